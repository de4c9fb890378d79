"""
Tests for metric graphs, models and refinements
"""

from fractions import Fraction

import pytest

from tropigon import gallery
from tropigon.errors import MetricGraphError
from tropigon.graph_core import are_isomorphic
from tropigon.metric_graph import (
    MetricGraph,
    Point,
    as_fraction,
    attach_tree,
    canonical_loopless_model,
    canonical_model,
    distance,
    format_fraction,
    identity_map,
    parse_point,
    refine_at,
    remove_loops,
    single_leaf,
)


def test_as_fraction_is_exact():
    assert as_fraction("1/3") == Fraction(1, 3)
    assert as_fraction(2) == Fraction(2)
    assert format_fraction(Fraction(4, 6)) == "2/3"
    with pytest.raises(MetricGraphError):
        as_fraction(0.5)
    with pytest.raises(MetricGraphError):
        as_fraction("one")


def test_parse_point_specs():
    assert parse_point("v:x") == Point(vertex="x")
    assert parse_point("e:e1@1/2") == Point(edge="e1", offset=Fraction(1, 2))
    assert str(parse_point("e:e1@1/2")) == "e:e1@1/2"
    for bad in ("x", "v:", "e:e1", "w:x"):
        with pytest.raises(MetricGraphError):
            parse_point(bad)


def test_point_on_normalizes_endpoints(theta):
    assert theta.point_on("e0", 0) == Point(vertex="x")
    assert theta.point_on("e0", 1) == Point(vertex="y")
    assert theta.point_on("e0", "1/2").edge == "e0"
    with pytest.raises(MetricGraphError):
        theta.point_on("e0", 2)


def test_lengths_must_be_positive():
    with pytest.raises(MetricGraphError):
        MetricGraph.from_edge_list([("a", "b", 0), ("a", "b", 1)])


def test_canonical_model_smooths_subdivisions():
    """An edge subdivided into 1 + 2 becomes a single edge of length 3"""
    m = MetricGraph.from_edge_list([("x", "m", 1), ("m", "y", 2), ("x", "y", 1), ("x", "y", 1)])
    canonical, rmap = canonical_model(m)
    assert sorted(canonical.vertices) == ["x", "y"]
    assert sorted(canonical.lengths.values()) == [1, 1, 3]
    assert rmap.to_coarse(Point(vertex="m")) == canonical.point_on("e0", 1)


def test_canonical_model_of_canonical_graph_is_itself(k4):
    canonical, _ = canonical_model(k4)
    assert canonical == k4


def test_canonical_model_needs_genus_two():
    with pytest.raises(MetricGraphError):
        canonical_model(gallery.cycle())


def test_canonical_loopless_model_bisects_loops():
    """A loop of length 3 becomes two parallel edges of length 3/2"""
    m = MetricGraph.from_edge_list([("v", "v", 3), ("v", "w", 1), ("v", "w", 1), ("v", "w", 1)])
    loopless, rmap = canonical_loopless_model(m)
    assert "e0@3/2" in loopless.vertices
    assert loopless.length("e0#0") == loopless.length("e0#1") == Fraction(3, 2)
    assert not loopless.graph.loops()
    assert rmap.to_coarse(Point(vertex="e0@3/2")) == m.point_on("e0", "3/2")


def test_refine_at_vertex_is_identity(theta):
    fine, rmap = refine_at(theta, [Point(vertex="x")])
    assert fine == theta
    assert rmap.paths == identity_map(theta).paths


def test_refine_at_interior_point():
    """Edge of length 5 refined at offset 2 gives pieces 2 and 3"""
    m = gallery.theta((5, 1, 1))
    fine, rmap = refine_at(m, [m.point_on("e0", 2)])
    assert fine.length("e0#0") == 2
    assert fine.length("e0#1") == 3
    assert fine.edges["e0#0"] == ("x", "e0@2/1")
    assert rmap.to_fine(m.point_on("e0", 4)) == fine.point_on("e0#1", 2)
    assert rmap.to_coarse(fine.point_on("e0#1", 1)) == m.point_on("e0", 3)
    assert rmap.to_coarse(Point(vertex="e0@2/1")) == m.point_on("e0", 2)


def test_refinement_maps_compose(theta):
    once, first = refine_at(theta, [theta.point_on("e1", "1/2")])
    twice, second = refine_at(once, [once.point_on("e1#1", "1/4")])
    composed = second.then(first)
    p = theta.point_on("e1", "7/8")
    assert composed.to_coarse(composed.to_fine(p)) == p
    assert composed.fine == twice


def test_remove_loops_keeps_vertices():
    m, _ = gallery.looped_theta()
    core = remove_loops(m)
    assert sorted(core.vertices) == ["x", "y"]
    assert "c" not in core.edges
    assert core.genus == m.genus - 1


def test_distance_on_theta():
    m = gallery.theta((1, 2, 3))
    assert distance(m, Point(vertex="x"), Point(vertex="x")) == 0
    assert distance(m, Point(vertex="x"), Point(vertex="y")) == 1
    assert distance(m, m.point_on("e2", 1), m.point_on("e2", 2)) == 1
    assert distance(m, m.point_on("e2", "1/2"), m.point_on("e2", "5/2")) == 2
    assert distance(m, m.point_on("e1", 1), m.point_on("e2", 1)) == 2


def test_attach_leaf_and_retract():
    """Gluing a leaf leaves the canonical model unchanged"""
    m = gallery.theta()
    modified = attach_tree(m, m.point_on("e0", "1/2"), single_leaf("1/2"), "root", prefix="leaf")
    assert "leaf.tip" in modified.vertices
    assert modified.length("leaf.leaf") == Fraction(1, 2)
    canonical, _ = canonical_model(modified)
    assert are_isomorphic(canonical.graph, m.graph)
    assert canonical.total_length == m.total_length


def test_attach_empty_tree_is_identity(theta):
    point_tree = MetricGraph.from_dict({"vertices": [{"id": "root"}], "edges": []})
    assert attach_tree(theta, Point(vertex="x"), point_tree, "root") == theta


def test_metric_graph_round_trip(prism):
    m, _ = prism
    assert MetricGraph.from_dict(m.to_dict()) == m
