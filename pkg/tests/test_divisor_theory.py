"""
Tests for divisors, reduction and rank
"""

import random
from collections import defaultdict
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Tuple

import networkx as nx
import pytest

from tropigon import gallery
from tropigon.divisor_theory import (
    Divisor,
    dhar_burn,
    divisor_of,
    find_trigonal_divisor,
    hyperelliptic_candidates,
    is_divisorially_d_gonal_witness,
    linearly_equivalent,
    point_divisor,
    rank,
    rank_at_least,
    rational_fn,
    reduce,
    smooth_common_edge,
    tent_function,
    to_effective,
    vertex_divisor,
)
from tropigon.errors import DivisorError, GraphError
from tropigon.graph_core import is_k_edge_connected
from tropigon.metric_graph import MetricGraph, Point

X, Y = Point(vertex="x"), Point(vertex="y")

UNIT_GRAPHS = {
    "theta": [("x", "y", 1)] * 3,
    "k4": [
        ("1", "2", 1),
        ("1", "3", 1),
        ("1", "4", 1),
        ("2", "3", 1),
        ("2", "4", 1),
        ("3", "4", 1),
    ],
    "prism": [
        ("a0", "a1", 1), ("a1", "a2", 1), ("a0", "a2", 1),
        ("b0", "b1", 1), ("b1", "b2", 1), ("b0", "b2", 1),
        ("a0", "b0", 1), ("a1", "b1", 1), ("a2", "b2", 1),
    ],
}


# ============= Chip-firing oracle =============


def _winnable(m: MetricGraph, chips: Dict[str, int]) -> bool:
    """Greedy borrowing on the underlying combinatorial graph."""
    current = defaultdict(int, chips)
    neighbours: Dict[str, List[str]] = defaultdict(list)
    for a, b in m.edges.values():
        neighbours[a].append(b)
        neighbours[b].append(a)
    borrowed = set()
    while True:
        debtors = sorted(v for v in m.vertices if current[v] < 0)
        if not debtors:
            return True
        if len(borrowed) == len(m.vertices):
            return False
        v = debtors[0]
        current[v] += len(neighbours[v])
        for w in neighbours[v]:
            current[w] -= 1
        borrowed.add(v)


def _oracle_rank(m: MetricGraph, chips: Dict[str, int]) -> int:
    r = -1
    for k in range(sum(chips.values()) + 1):
        for removed in combinations_with_replacement(sorted(m.vertices), k):
            probe = dict(chips)
            for v in removed:
                probe[v] = probe.get(v, 0) - 1
            if not _winnable(m, probe):
                return r
        r = k
    return r


# ============= Random graphs =============


def _random_lengths(rng: random.Random, shape) -> List[Tuple[str, str, Fraction]]:
    return [(a, b, Fraction(rng.randint(1, 6), rng.randint(1, 4))) for a, b, _ in shape]


def _random_point(rng: random.Random, m: MetricGraph) -> Point:
    if rng.random() < 0.4:
        return Point(vertex=rng.choice(sorted(m.vertices)))
    e = rng.choice(sorted(m.edges))
    return m.point_on(e, m.length(e) * Fraction(rng.randint(1, 3), 4))


def _random_unit_graphs(rng: random.Random, count: int) -> List[MetricGraph]:
    """Unit-length simple graphs on 4 to 6 vertices, 3-edge connected, valences at most 4"""
    found: List[MetricGraph] = []
    for _ in range(20000):
        if len(found) == count:
            break
        n = rng.randint(4, 6)
        g = nx.gnm_random_graph(n, rng.randint((3 * n + 1) // 2, 2 * n), seed=rng.randrange(2**32))
        if max(deg for _, deg in g.degree()) > 4:
            continue
        m = MetricGraph.from_edge_list([(str(a), str(b), 1) for a, b in sorted(g.edges())])
        if len(m.vertices) == n and is_k_edge_connected(m.graph, 3):
            found.append(m)
    return found


# ============= Divisors =============


def test_divisor_arithmetic_drops_zeros():
    d = Divisor.of([X, X, Y])
    assert d.degree == 3
    assert d[X] == 2
    assert (d - point_divisor(Y)).support == [X]
    assert (2 * d - d) == d
    assert (d - 3 * point_divisor(Y)).negative_part() == point_divisor(Y, 2)
    assert Divisor.from_dict(d.to_dict()) == d
    assert str(d) == "2*v:x + v:y"


def test_vertex_divisor_checks_vertices(theta):
    assert vertex_divisor(theta.graph, {"x": 2}) == point_divisor(X, 2)
    with pytest.raises(GraphError):
        vertex_divisor(theta.graph, {"z": 1})


# ============= Rational functions =============


def test_tent_function_divisor(theta):
    """A unit tent on an edge moves two chips from the ends to the middle"""
    f = tent_function(theta, "e0", 0, 1)
    mid = theta.point_on("e0", "1/2")
    assert divisor_of(f) == Divisor.of([X, Y]) - point_divisor(mid, 2)
    assert linearly_equivalent(theta, Divisor.of([X, Y]), point_divisor(mid, 2))


def test_steep_interior_tent(theta):
    f = tent_function(theta, "e0", "1/4", "3/4", slope=2)
    expected = Divisor(
        {
            theta.point_on("e0", "1/4"): 2,
            theta.point_on("e0", "1/2"): -4,
            theta.point_on("e0", "3/4"): 2,
        }
    )
    assert divisor_of(f) == expected
    assert divisor_of(f).degree == 0


def test_rational_function_validation(theta):
    with pytest.raises(DivisorError):
        rational_fn(theta, {X: 0, Y: "1/2"})
    with pytest.raises(DivisorError):
        rational_fn(theta, {X: 0})
    with pytest.raises(DivisorError):
        tent_function(theta, "e0", "1/2", 2)


# ============= Burning and reduction =============


def test_dhar_burn_blocked_by_three_chips(theta):
    report = dhar_burn(theta, point_divisor(Y, 3), X)
    assert not report.burns_all
    assert report.unburnt == frozenset({Y})
    assert report.blocking == {Y: 3}


def test_dhar_burn_rejects_negative_chips(theta):
    with pytest.raises(DivisorError):
        dhar_burn(theta, point_divisor(Y, -1), X)


def test_reduce_fires_across_the_theta(theta):
    assert reduce(theta, point_divisor(Y, 3), X) == point_divisor(X, 3)
    assert reduce(theta, point_divisor(Y, 2), X) == point_divisor(Y, 2)


def test_reduce_divisor_negative_away_from_base(theta):
    d = point_divisor(X) - point_divisor(Y)
    reduced = reduce(theta, d, X)
    assert reduced == point_divisor(Y, 2) - point_divisor(X, 2)
    assert linearly_equivalent(theta, d, reduced)


def test_reduced_divisor_laws(prism):
    """Reduction is idempotent, burns everything and stays in the class"""
    m, d = prism
    for base in (Point(vertex="a0"), Point(vertex="b2"), m.point_on("top", "1/3")):
        reduced = reduce(m, d, base)
        assert reduced.degree == d.degree
        assert reduce(m, reduced, base) == reduced
        assert dhar_burn(m, reduced, base).burns_all
        assert linearly_equivalent(m, d, reduced)


@pytest.mark.slow
def test_reduction_on_random_rational_graphs():
    """Idempotent, in the class, and blind to adding the divisor of a tent"""
    rng = random.Random(20240601)
    for case in range(200):
        shape = UNIT_GRAPHS[rng.choice(sorted(UNIT_GRAPHS))]
        m = MetricGraph.from_edge_list(_random_lengths(rng, shape))
        d = Divisor.of(_random_point(rng, m) for _ in range(rng.randint(1, 4)))
        base = _random_point(rng, m)
        reduced = reduce(m, d, base)
        assert reduce(m, reduced, base) == reduced, f"case {case}"
        assert dhar_burn(m, reduced, base).burns_all, f"case {case}"
        assert linearly_equivalent(m, d, reduced), f"case {case}"

        e = rng.choice(sorted(m.edges))
        lo, hi = sorted(rng.sample(range(9), 2))
        f = tent_function(
            m, e, m.length(e) * Fraction(lo, 8), m.length(e) * Fraction(hi, 8), rng.randint(1, 2)
        )
        assert reduce(m, d + divisor_of(f), base) == reduced, f"case {case}"


def test_to_effective(theta):
    assert to_effective(theta, point_divisor(X) - point_divisor(Y)) is None
    found = to_effective(theta, point_divisor(X, 4) - point_divisor(Y))
    assert found is not None and found.is_effective() and found.degree == 3


# ============= Rank =============


def test_rank_on_cycle():
    """On a genus-1 graph a degree-k effective divisor has rank k - 1"""
    m = gallery.cycle()
    p = Point(vertex="p")
    for k in (1, 2, 3, 4):
        assert rank(m, point_divisor(p, k)) == k - 1
        assert rank(m, point_divisor(p, k), use_riemann_roch=False) == k - 1
    assert rank(m, point_divisor(p) - point_divisor(Point(vertex="q"))) == -1


def test_rank_on_k4(k4):
    d1, d2 = gallery.k4_divisors()
    assert rank(k4, d1) == 1
    assert rank(k4, d2) == 1
    assert not linearly_equivalent(k4, d1, d2)
    assert rank(k4, Divisor.of([Point(vertex="v1"), Point(vertex="v2")])) == 0
    assert rank(k4, point_divisor(Point(vertex="v1"), 5)) == 2


def test_genus_two_degree_three_has_rank_one(theta):
    d = Divisor.of([X, Y, theta.point_on("e2", "1/3")])
    assert rank(theta, d) == 1
    assert rank(theta, d, use_riemann_roch=False) == 1


@pytest.mark.parametrize("name", sorted(UNIT_GRAPHS))
def test_rank_matches_chip_firing_oracle(name):
    """Divisors on vertices of unit-length graphs have the combinatorial rank"""
    m = MetricGraph.from_edge_list(UNIT_GRAPHS[name])
    rng = random.Random(20240517)
    vertices = sorted(m.vertices)
    for _ in range(8):
        chips: Dict[str, int] = defaultdict(int)
        for _ in range(rng.randint(1, 4)):
            chips[rng.choice(vertices)] += 1
        d = vertex_divisor(m.graph, chips)
        assert rank(m, d) == _oracle_rank(m, dict(chips)), f"{name}: {d}"


@pytest.mark.slow
def test_rank_on_random_graphs_matches_chip_firing_oracle():
    rng = random.Random(7)
    graphs = _random_unit_graphs(rng, 50)
    assert len(graphs) == 50
    for m in graphs:
        vertices = sorted(m.vertices)
        chips: Dict[str, int] = defaultdict(int)
        for _ in range(rng.randint(1, 4)):
            chips[rng.choice(vertices)] += 1
        d = vertex_divisor(m.graph, chips)
        assert rank(m, d) == _oracle_rank(m, dict(chips)), f"{sorted(m.edges.values())}: {d}"


def test_rank_at_least(k4):
    d1, _ = gallery.k4_divisors()
    assert rank_at_least(k4, d1, 1)
    assert not rank_at_least(k4, d1, 2)
    assert rank_at_least(k4, d1 - d1, 0)


# ============= Representatives and gonality =============


def test_smooth_common_edge(theta):
    d = Divisor.of([theta.point_on("e0", "1/4"), theta.point_on("e0", "1/2"), Y])
    smoothed = smooth_common_edge(theta, d)
    assert smoothed == Divisor.of([X, theta.point_on("e0", "3/4"), Y])
    assert linearly_equivalent(theta, d, smoothed)


def test_smooth_needs_effective_divisor(theta):
    with pytest.raises(DivisorError):
        smooth_common_edge(theta, point_divisor(X, -1))


def test_gonality_witness(k4):
    d1, _ = gallery.k4_divisors()
    assert is_divisorially_d_gonal_witness(k4, d1, 3)
    with pytest.raises(DivisorError):
        is_divisorially_d_gonal_witness(k4, d1, 2)


def test_k4_and_prism_are_not_hyperelliptic(k4, prism):
    assert hyperelliptic_candidates(k4) == []
    m, _ = prism
    assert hyperelliptic_candidates(m) == []


def test_find_trigonal_divisor(k4):
    found = find_trigonal_divisor(k4)
    assert found is not None
    assert found.degree == 3
    assert rank_at_least(k4, found, 1)


def test_find_trigonal_divisor_needs_genus_two():
    with pytest.raises(DivisorError):
        find_trigonal_divisor(gallery.cycle())
