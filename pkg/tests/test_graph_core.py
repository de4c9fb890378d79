"""
Tests for weighted multigraphs
"""

from itertools import combinations

import pytest

from tropigon.errors import GraphError
from tropigon.graph_core import (
    WeightedGraph,
    are_isomorphic,
    contract_edges,
    contract_edges_with_map,
    degree_sequence,
    edge_connectivity,
    enumerate_3_edge_cuts,
    genus,
    graph_hash,
    is_connected_without,
    is_k_edge_connected,
    is_stable,
    loopless_model,
    relabel,
    stabilize_with_chains,
    stable_model,
    valence,
)

K4_PAIRS = [(a, b) for a, b in combinations(["1", "2", "3", "4"], 2)]


def brute_force_connectivity(g: WeightedGraph) -> int:
    """Smallest k such that removing some k edges disconnects g."""
    edges = sorted(e for e in g.edges if not g.is_loop(e))
    for k in range(1, len(edges) + 1):
        for combo in combinations(edges, k):
            if not is_connected_without(g, combo):
                return k
    return len(edges)


def test_genus_counts_weights_and_loops():
    """Genus adds vertex weights to the first Betti number"""
    g = WeightedGraph.from_edge_list([("a", "b"), ("a", "b"), ("b", "b")], weights={"a": 2})
    assert genus(g) == 2 + 3 - 2 + 1


def test_valence_counts_loops_twice():
    g = WeightedGraph.from_edge_list([("a", "a"), ("a", "b")])
    assert valence(g, "a") == 3
    assert g.incident_edges("a") == ["e0", "e1"]


def test_graph_rejects_bad_input():
    """Unknown ends, negative weights and disconnected graphs are rejected"""
    with pytest.raises(GraphError):
        WeightedGraph(vertices={"a": 0}, edges={"e": ("a", "b")})
    with pytest.raises(GraphError):
        WeightedGraph(vertices={"a": -1}, edges={})
    with pytest.raises(GraphError):
        WeightedGraph(vertices={"a": 0, "b": 0}, edges={})


def test_contract_triangle_keeps_genus():
    """Contracting a cycle turns its Betti number into weight"""
    g = WeightedGraph.from_edge_list([("a", "b"), ("b", "c"), ("c", "a"), ("a", "d")])
    h, rename = contract_edges_with_map(g, ["e0", "e1", "e2"])
    assert h.vertices == {"a": 1, "d": 0}
    assert rename == {"a": "a", "b": "a", "c": "a", "d": "d"}
    assert genus(h) == genus(g)


def test_contract_loop_adds_weight():
    g = WeightedGraph.from_edge_list([("a", "a"), ("a", "b"), ("a", "b")])
    h = contract_edges(g, ["e0"])
    assert h.vertices["a"] == 1
    assert genus(h) == genus(g)


def test_stable_model_smooths_and_prunes():
    """A subdivided theta graph with a hanging tree stabilizes to the theta graph"""
    g = WeightedGraph.from_edge_list(
        [("x", "m"), ("m", "y"), ("x", "y"), ("x", "y"), ("y", "leaf"), ("leaf", "tip")]
    )
    st = stabilize_with_chains(g)
    assert sorted(st.graph.vertices) == ["x", "y"]
    assert len(st.graph.edges) == 3
    assert st.contracted == frozenset({"e4", "e5"})
    assert st.chains["e0"] == (("e0", False), ("e1", False))
    assert is_stable(st.graph)


def test_stable_model_requires_genus_two():
    g = WeightedGraph.from_edge_list([("a", "b"), ("b", "a")])
    with pytest.raises(GraphError):
        stable_model(g)


def test_loopless_model_splits_loops():
    g = WeightedGraph.from_edge_list([("v", "v"), ("v", "w"), ("v", "w"), ("v", "w")])
    h = loopless_model(g)
    assert "e0.mid" in h.vertices
    assert {h.edges["e0.a"], h.edges["e0.b"]} == {("v", "e0.mid"), ("e0.mid", "v")}
    assert not h.loops()
    assert genus(h) == genus(g)


def test_loopless_input_is_unchanged():
    g = WeightedGraph.from_edge_list(K4_PAIRS)
    assert loopless_model(g) == g


@pytest.mark.parametrize(
    "pairs, expected",
    [
        (K4_PAIRS, 3),
        ([("x", "y")] * 3, 3),
        ([("a", "b"), ("b", "c"), ("c", "a")], 2),
        ([("a", "b"), ("b", "c")], 1),
    ],
)
def test_edge_connectivity(pairs, expected):
    """Max-flow connectivity on small graphs"""
    g = WeightedGraph.from_edge_list(pairs)
    assert edge_connectivity(g) == expected
    assert edge_connectivity(g) == brute_force_connectivity(g)
    assert is_k_edge_connected(g, expected)
    assert not is_k_edge_connected(g, expected + 1)


def test_edge_connectivity_ignores_loops():
    g = WeightedGraph.from_edge_list([("x", "y")] * 3 + [("x", "x")])
    assert edge_connectivity(g) == 3


def test_single_vertex_is_k_edge_connected():
    g = WeightedGraph(vertices={"v": 0}, edges={"e0": ("v", "v")})
    assert is_k_edge_connected(g, 3)
    with pytest.raises(GraphError):
        edge_connectivity(g)


def test_three_edge_cuts_of_k4():
    """K4 has exactly the four vertex stars as 3-edge cuts"""
    g = WeightedGraph.from_edge_list(K4_PAIRS)
    cuts = enumerate_3_edge_cuts(g)
    assert len(cuts) == 4
    for cut in cuts:
        small, _ = sorted(cut.sides, key=len)
        assert len(small) == 1


def test_three_edge_cuts_skip_non_minimal_sets():
    """A triple containing a bridge is not a minimal cut"""
    g = WeightedGraph.from_edge_list([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
    assert enumerate_3_edge_cuts(g) == []


def test_isomorphism_under_relabelling():
    g = WeightedGraph.from_edge_list(K4_PAIRS + [("1", "2")])
    h = relabel(g, {"1": "p", "2": "q", "3": "r", "4": "s"})
    assert are_isomorphic(g, h)
    assert graph_hash(g) == graph_hash(h)


def test_isomorphism_respects_multiplicity_and_weight():
    """The theta graph differs from a triangle, weights and multiplicities count"""
    theta = WeightedGraph.from_edge_list([("x", "y")] * 3)
    triangle = WeightedGraph.from_edge_list([("a", "b"), ("b", "c"), ("c", "a")])
    assert not are_isomorphic(theta, triangle)

    double = WeightedGraph.from_edge_list([("a", "b"), ("a", "b"), ("b", "c"), ("c", "a")])
    moved = WeightedGraph.from_edge_list([("a", "b"), ("b", "c"), ("b", "c"), ("c", "a")])
    assert are_isomorphic(double, moved)

    weighted = WeightedGraph.from_edge_list([("x", "y")] * 3, weights={"x": 1})
    other = WeightedGraph.from_edge_list([("x", "y")] * 3, weights={"y": 1})
    assert are_isomorphic(weighted, other)
    assert not are_isomorphic(weighted, theta)


def test_relabel_must_be_injective():
    g = WeightedGraph.from_edge_list([("a", "b")])
    with pytest.raises(GraphError):
        relabel(g, {"a": "b"})


def test_degree_sequence():
    g = WeightedGraph.from_edge_list([("a", "a"), ("a", "b"), ("b", "c")])
    assert list(degree_sequence(g)) == [3, 2, 1]


def test_round_trip_dict():
    g = WeightedGraph.from_edge_list([("a", "b"), ("b", "b")], weights={"b": 2})
    assert WeightedGraph.from_dict(g.to_dict()) == g
