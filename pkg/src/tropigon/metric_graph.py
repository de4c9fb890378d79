"""
Metric Graph - Models with Exact Lengths

A metric graph is presented by a model: a weighted multigraph whose edges carry
positive rational lengths.

Features:
- normalized points (vertex form at endpoints) with "v:ID" / "e:ID@p/q" specs
- canonical and canonical loopless models with refinement bookkeeping
- refinement at arbitrary point sets
- exact shortest-path distance
- tropical modifications by gluing metric trees
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import networkx as nx
from loguru import logger

from .errors import GraphError, MetricGraphError
from .graph_core import (
    Chain,
    EdgeId,
    VertexId,
    WeightedGraph,
    genus,
    reverse_chain,
    stabilize_with_chains,
)

Rational = Union[int, str, Fraction]


def as_fraction(value: Rational) -> Fraction:
    """Parses an int, Fraction or "p/q" string without ever going through float."""
    if isinstance(value, float):
        raise MetricGraphError(f"floating point value {value!r} is not exact")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise MetricGraphError(f"not a rational number: {value!r}") from None


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Point:
    """
    A point of a metric graph.

    Either a vertex (`vertex` set) or an interior point of an edge (`edge` set,
    0 < offset < l(edge), measured from the edge's first end). Use
    MetricGraph.point_on to get the normalized form.
    """

    vertex: Optional[VertexId] = None
    edge: Optional[EdgeId] = None
    offset: Fraction = Fraction(0)

    @classmethod
    def at(cls, vertex: VertexId) -> "Point":
        return cls(vertex=vertex)

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self) -> Tuple[int, str, Fraction]:
        if self.vertex is not None:
            return (0, self.vertex, Fraction(0))
        return (1, str(self.edge), self.offset)

    def __str__(self) -> str:
        if self.vertex is not None:
            return f"v:{self.vertex}"
        return f"e:{self.edge}@{format_fraction(self.offset)}"


def parse_point(text: str) -> Point:
    """
    Parses a point string "v:ID" or "e:ID@p/q".

    Raises:
        MetricGraphError: If the string is malformed
    """
    kind, _, rest = text.partition(":")
    if kind == "v" and rest:
        return Point(vertex=rest)
    if kind == "e" and "@" in rest:
        edge, _, offset = rest.rpartition("@")
        return Point(edge=edge, offset=as_fraction(offset))
    raise MetricGraphError(f"malformed point {text!r}")


@dataclass(frozen=True)
class MetricGraph:
    """
    A metric graph given by a model and positive rational edge lengths.

    Attributes:
        graph (WeightedGraph): The model
        lengths (Dict[str, Fraction]): Edge id -> length
    """

    graph: WeightedGraph
    lengths: Dict[EdgeId, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        normalized = {e: as_fraction(length) for e, length in self.lengths.items()}
        if set(normalized) != set(self.graph.edges):
            raise MetricGraphError("lengths must be given for exactly the model's edges")
        for e, length in normalized.items():
            if length <= 0:
                raise MetricGraphError(f"edge {e} has non-positive length {length}")
        object.__setattr__(self, "lengths", normalized)

    def __str__(self) -> str:
        return f"MetricGraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, g={self.genus})"

    @property
    def vertices(self) -> Dict[VertexId, int]:
        return self.graph.vertices

    @property
    def edges(self) -> Dict[EdgeId, Tuple[VertexId, VertexId]]:
        return self.graph.edges

    @property
    def genus(self) -> int:
        return genus(self.graph)

    @property
    def total_length(self) -> Fraction:
        return sum(self.lengths.values(), Fraction(0))

    def length(self, e: EdgeId) -> Fraction:
        try:
            return self.lengths[e]
        except KeyError:
            raise MetricGraphError(f"unknown edge {e}") from None

    def point_on(self, edge: EdgeId, offset: Rational) -> Point:
        """Normalized point at `offset` from the first end of `edge`."""
        off = as_fraction(offset)
        length = self.length(edge)
        if off < 0 or off > length:
            raise MetricGraphError(f"offset {off} outside [0, {length}] on edge {edge}")
        a, b = self.graph.ends(edge)
        if off == 0:
            return Point(vertex=a)
        if off == length:
            return Point(vertex=b)
        return Point(edge=edge, offset=off)

    def normalize(self, p: Point) -> Point:
        """Validates a point and returns its normalized form."""
        if p.vertex is not None:
            if p.vertex not in self.vertices:
                raise MetricGraphError(f"unknown vertex {p.vertex}")
            return p
        if p.edge is None:
            raise MetricGraphError("a point needs a vertex or an edge")
        return self.point_on(p.edge, p.offset)

    def to_dict(self) -> Dict[str, Any]:
        """Converts the metric graph to dictionary format"""
        data = self.graph.to_dict()
        for item in data["edges"]:
            item["length"] = format_fraction(self.lengths[item["id"]])
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MetricGraph":
        """Creates a metric graph from a dictionary"""
        graph = WeightedGraph.from_dict(data)
        lengths = {str(item["id"]): as_fraction(item.get("length", 1)) for item in data["edges"]}
        return cls(graph=graph, lengths=lengths)

    @classmethod
    def from_edge_list(
        cls, items: Iterable[Tuple[Any, Any, Rational]], prefix: str = "e"
    ) -> "MetricGraph":
        """Builds a metric graph from (u, v, length) triples with edges e0, e1, ..."""
        items = list(items)
        graph = WeightedGraph.from_edge_list(((a, b) for a, b, _ in items), prefix=prefix)
        lengths = {f"{prefix}{i}": as_fraction(length) for i, (_, _, length) in enumerate(items)}
        return cls(graph=graph, lengths=lengths)


# ============= Refinements =============


@dataclass(frozen=True)
class RefinementMap:
    """
    Identification of a fine model with a coarse model of the same metric space.

    Every coarse edge is an ordered path of fine edges read from the coarse
    edge's first end. Fine edges missing from all paths belong to trees that
    the coarse model dropped.

    Attributes:
        fine (MetricGraph): The refined (source) model
        coarse (MetricGraph): The coarser (target) model
        paths (Dict[str, Chain]): Coarse edge -> (fine edge, reversed) pieces
    """

    fine: MetricGraph
    coarse: MetricGraph
    paths: Dict[EdgeId, Chain]
    _index: Dict[EdgeId, Tuple[EdgeId, Fraction, bool]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        index = {}
        for ce, pieces in self.paths.items():
            start = Fraction(0)
            for fe, rev in pieces:
                index[fe] = (ce, start, rev)
                start += self.fine.length(fe)
            if start != self.coarse.length(ce):
                raise MetricGraphError(f"pieces of {ce} do not add up to its length")
        object.__setattr__(self, "_index", index)

    def to_coarse(self, p: Point) -> Optional[Point]:
        """Maps a fine point to the coarse model, or None if it lies on a dropped tree."""
        p = self.fine.normalize(p)
        if p.vertex is not None:
            if p.vertex in self.coarse.vertices:
                return p
            for fe in self.fine.graph.incident_edges(p.vertex):
                if fe in self._index:
                    local = (
                        Fraction(0) if self.fine.edges[fe][0] == p.vertex else self.fine.length(fe)
                    )
                    return self._coarse_point(fe, local)
            return None
        if p.edge not in self._index:
            return None
        return self._coarse_point(p.edge, p.offset)

    def _coarse_point(self, fe: EdgeId, local: Fraction) -> Point:
        ce, start, rev = self._index[fe]
        along = self.fine.length(fe) - local if rev else local
        return self.coarse.point_on(ce, start + along)

    def to_fine(self, p: Point) -> Point:
        """Maps a coarse point to the fine model."""
        p = self.coarse.normalize(p)
        if p.vertex is not None:
            return p
        start = Fraction(0)
        for fe, rev in self.paths[str(p.edge)]:
            length = self.fine.length(fe)
            if p.offset < start + length:
                along = p.offset - start
                return self.fine.point_on(fe, length - along if rev else along)
            start += length
        raise MetricGraphError(f"offset {p.offset} past the end of {p.edge}")

    def then(self, outer: "RefinementMap") -> "RefinementMap":
        """Composes with a map whose fine model is this map's coarse model."""
        paths: Dict[EdgeId, Chain] = {}
        for ce, pieces in outer.paths.items():
            expanded: List[Tuple[EdgeId, bool]] = []
            for mid, rev in pieces:
                inner = self.paths[mid]
                expanded.extend(reverse_chain(inner) if rev else inner)
            paths[ce] = tuple(expanded)
        return RefinementMap(fine=self.fine, coarse=outer.coarse, paths=paths)


def identity_map(m: MetricGraph) -> RefinementMap:
    return RefinementMap(fine=m, coarse=m, paths={e: ((e, False),) for e in m.edges})


def canonical_model(m: MetricGraph) -> Tuple[MetricGraph, RefinementMap]:
    """
    Removes leaves (with their trees) and valence-2 vertices.

    Args:
        m: A metric graph of genus at least 2

    Returns:
        Tuple[MetricGraph, RefinementMap]: The canonical model and the map from m to it

    Raises:
        MetricGraphError: If the genus is smaller than 2
    """
    if m.genus < 2:
        raise MetricGraphError(f"canonical model needs genus >= 2, got {m.genus}")
    stab = stabilize_with_chains(m.graph)
    lengths = {
        e: sum((m.length(piece) for piece, _ in chain), Fraction(0))
        for e, chain in stab.chains.items()
    }
    canonical = MetricGraph(graph=stab.graph, lengths=lengths)
    return canonical, RefinementMap(fine=m, coarse=canonical, paths=dict(stab.chains))


def refine_at(m: MetricGraph, pts: Iterable[Point]) -> Tuple[MetricGraph, RefinementMap]:
    """
    Inserts a vertex at every interior point of `pts`.

    New vertices are named '<edge>@<p/q>' and the pieces of a split edge
    '<edge>#<i>', numbered from the edge's first end.

    Returns:
        Tuple[MetricGraph, RefinementMap]: The refinement and its map onto m
    """
    cuts: Dict[EdgeId, set] = {}
    for p in pts:
        p = m.normalize(p)
        if p.edge is not None:
            cuts.setdefault(p.edge, set()).add(p.offset)

    vertices = dict(m.vertices)
    edges: Dict[EdgeId, Tuple[VertexId, VertexId]] = {}
    lengths: Dict[EdgeId, Fraction] = {}
    paths: Dict[EdgeId, Chain] = {}
    for e, (a, b) in m.edges.items():
        offsets = sorted(cuts.get(e, ()))
        if not offsets:
            edges[e], lengths[e], paths[e] = (a, b), m.length(e), ((e, False),)
            continue
        names = [f"{e}@{format_fraction(off)}" for off in offsets]
        for name in names:
            if name in vertices:
                raise MetricGraphError(f"vertex id {name} already in use")
            vertices[name] = 0
        stops = [a] + names + [b]
        marks = [Fraction(0)] + offsets + [m.length(e)]
        pieces = []
        for i in range(len(stops) - 1):
            piece = f"{e}#{i}"
            edges[piece] = (stops[i], stops[i + 1])
            lengths[piece] = marks[i + 1] - marks[i]
            pieces.append((piece, False))
        paths[e] = tuple(pieces)

    fine = MetricGraph(graph=WeightedGraph(vertices=vertices, edges=edges), lengths=lengths)
    return fine, RefinementMap(fine=fine, coarse=m, paths=paths)


def canonical_loopless_model(m: MetricGraph) -> Tuple[MetricGraph, RefinementMap]:
    """Canonical model with every loop bisected; the map goes onto the canonical model."""
    canonical, _ = canonical_model(m)
    midpoints = [
        Point(edge=e, offset=canonical.length(e) / 2) for e in canonical.graph.loops()
    ]
    return refine_at(canonical, midpoints)


def remove_loops(m: MetricGraph) -> MetricGraph:
    """The core Γ°: the same model with loop edges deleted."""
    keep = {e: ends for e, ends in m.edges.items() if ends[0] != ends[1]}
    return MetricGraph(
        graph=WeightedGraph(vertices=dict(m.vertices), edges=keep),
        lengths={e: m.lengths[e] for e in keep},
    )


# ============= Distances =============


def to_weighted_networkx(m: MetricGraph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(sorted(m.vertices))
    for e in sorted(m.edges):
        a, b = m.edges[e]
        h.add_edge(a, b, key=e, length=m.lengths[e])
    return h


def distance(m: MetricGraph, a: Point, b: Point) -> Fraction:
    """Exact length of a shortest path between two points."""
    a, b = m.normalize(a), m.normalize(b)
    if a == b:
        return Fraction(0)
    fine, rmap = refine_at(m, [a, b])
    source, target = rmap.to_fine(a).vertex, rmap.to_fine(b).vertex
    return Fraction(
        nx.dijkstra_path_length(to_weighted_networkx(fine), source, target, weight="length")
    )


# ============= Tropical modification =============


def is_metric_tree(m: MetricGraph) -> bool:
    return len(m.edges) == len(m.vertices) - 1


def attach_tree(
    m: MetricGraph, at: Point, tree: MetricGraph, root: VertexId, prefix: str = "t"
) -> MetricGraph:
    """
    Glues a metric tree to m by identifying `root` with the point `at`.

    Tree vertices and edges are renamed '<prefix>.<id>'; an interior `at` is
    first turned into a vertex.

    Raises:
        MetricGraphError: If `tree` is not a tree or `root` is not one of its vertices
    """
    if not is_metric_tree(tree):
        raise MetricGraphError("attached graph is not a tree")
    if root not in tree.vertices:
        raise MetricGraphError(f"root {root} is not a vertex of the tree")
    if not tree.edges:
        return m

    base, rmap = refine_at(m, [at])
    anchor = rmap.to_fine(at).vertex
    assert anchor is not None

    def rename(v: VertexId) -> VertexId:
        return anchor if v == root else f"{prefix}.{v}"

    vertices = dict(base.vertices)
    edges = dict(base.edges)
    lengths = dict(base.lengths)
    for v in tree.vertices:
        if v != root:
            if rename(v) in vertices:
                raise GraphError(f"vertex id {rename(v)} already in use")
            vertices[rename(v)] = 0
    for e, (a, b) in tree.edges.items():
        name = f"{prefix}.{e}"
        if name in edges:
            raise GraphError(f"edge id {name} already in use")
        edges[name] = (rename(a), rename(b))
        lengths[name] = tree.lengths[e]
    logger.debug(f"Attached a tree with {len(tree.edges)} edges at {at}")
    return MetricGraph(graph=WeightedGraph(vertices=vertices, edges=edges), lengths=lengths)


def single_leaf(length: Rational) -> MetricGraph:
    """A one-edge tree 'root'–'tip' of the given length."""
    return MetricGraph(
        graph=WeightedGraph(vertices={"root": 0, "tip": 0}, edges={"leaf": ("root", "tip")}),
        lengths={"leaf": as_fraction(length)},
    )
