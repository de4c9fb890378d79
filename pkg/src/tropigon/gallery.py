"""
Gallery - Named Example Graphs, Divisors and Morphisms

Small hand-checked inputs shared by the test suite and the `gallery`
subcommand. Every entry is built from scratch on each call.

Features:
- theta graph, K4 and the uneven prism with its trigonal divisor
- a genus-5 graph with a rung between two triangles
- a theta graph with a loop, handled by the loop construction
- morphisms that are non-harmonic, degenerate, of degree 2, and of degree 3
  with contracted edges
"""

from typing import Callable, Dict, Tuple

from .divisor_theory import Divisor
from .errors import MetricGraphError
from .graph_core import WeightedGraph
from .harmonic_morphism import IndexedMorphism
from .metric_graph import MetricGraph, Point, Rational, as_fraction


def _metric(edges: Dict[str, Tuple[str, str, Rational]]) -> MetricGraph:
    vertices: Dict[str, int] = {}
    for a, b, _ in edges.values():
        vertices.setdefault(a, 0)
        vertices.setdefault(b, 0)
    graph = WeightedGraph(vertices=vertices, edges={e: (a, b) for e, (a, b, _) in edges.items()})
    return MetricGraph(graph=graph, lengths={e: as_fraction(l) for e, (_, _, l) in edges.items()})


def _vertices(*names: str) -> Divisor:
    return Divisor.of(Point(vertex=v) for v in names)


# ============= Graphs and divisors =============


def theta(lengths: Tuple[Rational, Rational, Rational] = (1, 1, 1)) -> MetricGraph:
    """Two vertices x, y joined by three edges e0, e1, e2."""
    return _metric({f"e{i}": ("x", "y", length) for i, length in enumerate(lengths)})


def k4(length: Rational = 1) -> MetricGraph:
    """Complete graph on v1..v4, all edges of the same length."""
    names = ["v1", "v2", "v3", "v4"]
    edges = {
        f"{a}{b}": (a, b, length) for i, a in enumerate(names) for b in names[i + 1 :]
    }
    return _metric(edges)


def k4_divisors() -> Tuple[Divisor, Divisor]:
    """Two trigonal divisors of K4 that are not linearly equivalent."""
    return _vertices("v1", "v2", "v3"), _vertices("v2", "v3", "v4")


def cycle(length: Rational = 4) -> MetricGraph:
    """A single loop-free cycle on two vertices."""
    half = as_fraction(length) / 2
    return _metric({"e0": ("p", "q", half), "e1": ("q", "p", half)})


def uneven_prism(
    l1: Rational = 1, l2: Rational = 2, l3: Rational = 4
) -> Tuple[MetricGraph, Divisor]:
    """
    Two triangles a0a1a2 and b0b1b2 joined by edges of distinct lengths.

    The joining edges are bottom a0-b0 (l1), middle a1-b1 (l2) and top a2-b2
    (l3), with l1 < l2 < l3. The triangle sides are chosen so that
    a0 + a2 + (the point of the middle edge at distance l1 from b1) has rank 1:
    a0a1 = a1a2 = l2 - l1, b1b2 = l3 - l1 and b0b2 = l3.

    Returns:
        Tuple[MetricGraph, Divisor]: The graph and its trigonal divisor
    """
    l1, l2, l3 = as_fraction(l1), as_fraction(l2), as_fraction(l3)
    if not l1 < l2 < l3:
        raise MetricGraphError("expected l1 < l2 < l3")
    m = _metric(
        {
            "bottom": ("a0", "b0", l1),
            "middle": ("a1", "b1", l2),
            "top": ("a2", "b2", l3),
            "a01": ("a0", "a1", l2 - l1),
            "a12": ("a1", "a2", l2 - l1),
            "a02": ("a0", "a2", 1),
            "b01": ("b0", "b1", 1),
            "b12": ("b1", "b2", l3 - l1),
            "b02": ("b0", "b2", l3),
        }
    )
    d = _vertices("a0", "a2") + Divisor.of([m.point_on("middle", l2 - l1)])
    return m, d


def naive_prism_morphism(m: MetricGraph) -> IndexedMorphism:
    """
    Sends the three joining edges of uneven_prism onto one edge of K2.

    Combinatorially harmonic of degree 3; the lengths cannot agree unless
    the joining edges have equal lengths.
    """
    target = _metric({"s": ("t0", "t1", m.length("bottom"))})
    joining = ("bottom", "middle", "top")
    return IndexedMorphism.between(
        m,
        target,
        vertex_map={v: "t0" if v.startswith("a") else "t1" for v in m.vertices},
        edge_map={e: "s" for e in joining},
        indices={e: 1 if e in joining else 0 for e in m.edges},
    )


def rung_graph() -> Tuple[MetricGraph, Divisor]:
    """
    Genus 5: triangles l0l1l2 and r0r1r2 joined by three paths, with a rung a-b.

    The paths are l1-a-r1, l2-b-r2 and the bottom edge l0-r0 of length 2.
    The divisor a + b + (midpoint of the bottom edge) is the fibre of a
    cover onto a path with two edges.
    """
    m = _metric(
        {
            "top_l": ("l1", "a", 1),
            "top_r": ("a", "r1", 1),
            "mid_l": ("l2", "b", 1),
            "mid_r": ("b", "r2", 1),
            "rung": ("a", "b", 1),
            "bottom": ("l0", "r0", 2),
            "l01": ("l0", "l1", 1),
            "l02": ("l0", "l2", 1),
            "l12": ("l1", "l2", 1),
            "r01": ("r0", "r1", 1),
            "r02": ("r0", "r2", 1),
            "r12": ("r1", "r2", 1),
        }
    )
    return m, _vertices("a", "b") + Divisor.of([m.point_on("bottom", 1)])


def looped_theta(loop_length: Rational = 2) -> Tuple[MetricGraph, Divisor]:
    """Theta graph with a loop at x; 2x + y has rank 1."""
    m = _metric(
        {
            "e0": ("x", "y", 1),
            "e1": ("x", "y", 1),
            "e2": ("x", "y", 1),
            "c": ("x", "x", loop_length),
        }
    )
    return m, Divisor({Point(vertex="x"): 2, Point(vertex="y"): 1})


# ============= Morphisms =============


def _double_pinch() -> Dict[str, Tuple[str, str, Rational]]:
    """Two digons u1u2 and w1w2 hanging off the path c1-c2."""
    return {
        "ua": ("u1", "u2", 1),
        "ub": ("u1", "u2", 1),
        "u1c": ("u1", "c1", 1),
        "u2c": ("u2", "c1", 1),
        "cc": ("c1", "c2", 1),
        "cw1": ("c2", "w1", 1),
        "cw2": ("c2", "w2", 1),
        "wa": ("w1", "w2", 1),
        "wb": ("w1", "w2", 1),
    }


def non_harmonic_morphism() -> IndexedMorphism:
    """Non-degenerate, not harmonic at c1 and c2: c1-c2 is contracted."""
    source = _metric(_double_pinch())
    target = _metric({"blue": ("a", "b", 1), "red": ("b", "c", 1)})
    edge_map = {"u1c": "blue", "u2c": "blue", "cw1": "red", "cw2": "red"}
    return IndexedMorphism.between(
        source,
        target,
        vertex_map={"u1": "a", "u2": "a", "c1": "b", "c2": "b", "w1": "c", "w2": "c"},
        edge_map=edge_map,
        indices={e: 1 if e in edge_map else 0 for e in source.edges},
    )


def degree_two_morphism() -> IndexedMorphism:
    """Harmonic of degree 2; the edge c1-c2 has index 2 and half the target length."""
    edges = _double_pinch()
    edges["cc"] = ("c1", "c2", "1/2")
    source = _metric(edges)
    target = _metric({"blue": ("a", "b", 1), "mid": ("b", "c", 1), "red": ("c", "d", 1)})
    edge_map = {"u1c": "blue", "u2c": "blue", "cc": "mid", "cw1": "red", "cw2": "red"}
    indices = {e: 1 if e in edge_map else 0 for e in source.edges}
    indices["cc"] = 2
    return IndexedMorphism.between(
        source,
        target,
        vertex_map={"u1": "a", "u2": "a", "c1": "b", "c2": "c", "w1": "d", "w2": "d"},
        edge_map=edge_map,
        indices=indices,
    )


def degenerate_morphism() -> IndexedMorphism:
    """A ladder folded onto one edge with an extra vertex z whose edges are all contracted."""
    source = _metric(
        {
            "h0": ("p0", "q0", 1),
            "h1": ("p1", "q1", 1),
            "h2": ("p2", "q2", 1),
            "p01": ("p0", "p1", 1),
            "p12": ("p1", "p2", 1),
            "q01": ("q0", "q1", 1),
            "q12": ("q1", "q2", 1),
            "q02": ("q0", "q2", 1),
            "z0": ("z", "p0", 1),
            "z1": ("z", "p1", 1),
            "z2": ("z", "p2", 1),
        }
    )
    target = _metric({"s": ("a", "b", 1)})
    edge_map = {"h0": "s", "h1": "s", "h2": "s"}
    return IndexedMorphism.between(
        source,
        target,
        vertex_map={v: "b" if v.startswith("q") else "a" for v in source.vertices},
        edge_map=edge_map,
        indices={e: 1 if e in edge_map else 0 for e in source.edges},
    )


def contracting_cover() -> IndexedMorphism:
    """
    Degree 3 onto a path x-y-z with four contracted edges.

    A triangle over x, three red edges of length 2 onto x-y, a contracted
    edge between two of the middle vertices over y, and three blue edges of
    length 1 meeting at c over z.
    """
    source = _metric(
        {
            "l01": ("l0", "l1", 1),
            "l12": ("l1", "l2", 1),
            "l02": ("l0", "l2", 1),
            "r0": ("l0", "m0", 2),
            "r1": ("l1", "m1", 2),
            "r2": ("l2", "m2", 2),
            "m02": ("m0", "m2", 1),
            "b0": ("m0", "c", 1),
            "b1": ("m1", "c", 1),
            "b2": ("m2", "c", 1),
        }
    )
    target = _metric({"red": ("x", "y", 2), "blue": ("y", "z", 1)})
    edge_map = {"r0": "red", "r1": "red", "r2": "red", "b0": "blue", "b1": "blue", "b2": "blue"}
    vertex_map = {v: {"l": "x", "m": "y"}.get(v[0], "z") for v in source.vertices}
    return IndexedMorphism.between(
        source,
        target,
        vertex_map=vertex_map,
        edge_map=edge_map,
        indices={e: 1 if e in edge_map else 0 for e in source.edges},
    )


# ============= Registry =============

GRAPHS: Dict[str, Callable[[], MetricGraph]] = {
    "theta": theta,
    "k4": k4,
    "cycle": cycle,
    "prism": lambda: uneven_prism()[0],
    "rung": lambda: rung_graph()[0],
    "looped-theta": lambda: looped_theta()[0],
}

DIVISORS: Dict[str, Callable[[], Tuple[MetricGraph, Divisor]]] = {
    "k4": lambda: (k4(), k4_divisors()[0]),
    "prism": uneven_prism,
    "rung": rung_graph,
    "looped-theta": looped_theta,
}

MORPHISMS: Dict[str, Callable[[], IndexedMorphism]] = {
    "non-harmonic": non_harmonic_morphism,
    "degenerate": degenerate_morphism,
    "degree-two": degree_two_morphism,
    "contracting": contracting_cover,
    "naive-prism": lambda: naive_prism_morphism(uneven_prism()[0]),
}


def names() -> Dict[str, Tuple[str, ...]]:
    return {
        "graph": tuple(sorted(GRAPHS)),
        "divisor": tuple(sorted(DIVISORS)),
        "morphism": tuple(sorted(MORPHISMS)),
    }
