"""
Harmonic Morphisms

Indexed morphisms between weighted graphs and their metric versions.

Features:
- structural validation of vertex maps, edge maps and indices
- harmonicity, non-degeneracy and degree reports
- horizontal multiplicity and pullback of divisors
- removal of edge contractions by a tropical modification
- the local Riemann–Hurwitz equation
"""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from loguru import logger

from .divisor_theory import Divisor
from .errors import MorphismError
from .graph_core import EdgeId, VertexId, WeightedGraph
from .metric_graph import MetricGraph, Point, as_fraction, format_fraction


@dataclass(frozen=True)
class IndexedMorphism:
    """
    A morphism of graphs with edge indices.

    Non-contracted edges are listed in `edge_map`; every other edge is
    contracted onto the common image of its ends and has index 0. Lengths are
    optional; when both are present the morphism is a morphism of metric graphs.

    Attributes:
        source (WeightedGraph): Source graph
        target (WeightedGraph): Target graph
        vertex_map (Dict[str, str]): Source vertex -> target vertex
        edge_map (Dict[str, str]): Non-contracted source edge -> target edge
        indices (Dict[str, int]): Source edge -> index μ(e)
        source_lengths (Optional[Dict[str, Fraction]]): Source edge lengths
        target_lengths (Optional[Dict[str, Fraction]]): Target edge lengths
        folds (FrozenSet[str]): Midpoints inserted by remove_contractions
    """

    source: WeightedGraph
    target: WeightedGraph
    vertex_map: Dict[VertexId, VertexId]
    edge_map: Dict[EdgeId, EdgeId]
    indices: Dict[EdgeId, int]
    source_lengths: Optional[Dict[EdgeId, Fraction]] = None
    target_lengths: Optional[Dict[EdgeId, Fraction]] = None
    folds: FrozenSet[VertexId] = field(default_factory=frozenset)

    @classmethod
    def between(
        cls,
        source: MetricGraph,
        target: MetricGraph,
        vertex_map: Dict[VertexId, VertexId],
        edge_map: Dict[EdgeId, EdgeId],
        indices: Dict[EdgeId, int],
    ) -> "IndexedMorphism":
        """Builds a morphism of metric graphs."""
        return cls(
            source=source.graph,
            target=target.graph,
            vertex_map=vertex_map,
            edge_map=edge_map,
            indices=indices,
            source_lengths=dict(source.lengths),
            target_lengths=dict(target.lengths),
        )

    @property
    def is_metric(self) -> bool:
        return self.source_lengths is not None and self.target_lengths is not None

    @property
    def source_metric(self) -> MetricGraph:
        if self.source_lengths is None:
            raise MorphismError("morphism has no source lengths")
        return MetricGraph(graph=self.source, lengths=self.source_lengths)

    @property
    def target_metric(self) -> MetricGraph:
        if self.target_lengths is None:
            raise MorphismError("morphism has no target lengths")
        return MetricGraph(graph=self.target, lengths=self.target_lengths)

    def contracted_edges(self) -> List[EdgeId]:
        return [e for e in sorted(self.source.edges) if e not in self.edge_map]

    def image(self, e: EdgeId) -> Tuple[str, str]:
        """('edge', target edge) or ('vertex', target vertex)."""
        if e in self.edge_map:
            return ("edge", self.edge_map[e])
        return ("vertex", self.vertex_map[self.source.ends(e)[0]])

    def fibre(self, target_edge: EdgeId) -> List[EdgeId]:
        return sorted(e for e, te in self.edge_map.items() if te == target_edge)

    def vertex_fibre(self, target_vertex: VertexId) -> List[VertexId]:
        return sorted(v for v, t in self.vertex_map.items() if t == target_vertex)

    def to_dict(self) -> Dict[str, Any]:
        """Converts the morphism to dictionary format"""
        source = self.source_metric.to_dict() if self.source_lengths else self.source.to_dict()
        target = self.target_metric.to_dict() if self.target_lengths else self.target.to_dict()
        return {
            "source": source,
            "target": target,
            "vertex_map": dict(sorted(self.vertex_map.items())),
            "edge_map": {
                e: {"kind": kind, "id": ident}
                for e in sorted(self.source.edges)
                for kind, ident in [self.image(e)]
            },
            "indices": dict(sorted(self.indices.items())),
            "folds": sorted(self.folds),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IndexedMorphism":
        """Creates a morphism from a dictionary"""
        metric = all("length" in item for item in data["source"]["edges"]) and all(
            "length" in item for item in data["target"]["edges"]
        )
        source = WeightedGraph.from_dict(data["source"])
        target = WeightedGraph.from_dict(data["target"])
        edge_map = {
            e: str(image["id"]) for e, image in data["edge_map"].items() if image["kind"] == "edge"
        }
        return cls(
            source=source,
            target=target,
            vertex_map={str(v): str(t) for v, t in data["vertex_map"].items()},
            edge_map=edge_map,
            indices={str(e): int(k) for e, k in data["indices"].items()},
            source_lengths=(
                {str(i["id"]): as_fraction(i["length"]) for i in data["source"]["edges"]}
                if metric
                else None
            ),
            target_lengths=(
                {str(i["id"]): as_fraction(i["length"]) for i in data["target"]["edges"]}
                if metric
                else None
            ),
            folds=frozenset(data.get("folds", [])),
        )


@dataclass
class MorphismReport:
    """
    Result of check_morphism.

    Attributes:
        harmonic (bool): Local degrees agree over all target edges at every vertex
        non_degenerate (bool): Every vertex has positive local degree
        degree (Optional[int]): Degree, only for harmonic morphisms onto a graph with edges
        multiplicities (Dict[str, int]): Vertex -> m_φ (the largest local degree if not harmonic)
        violations (List[str]): Human-readable problems found
        metric_consistent (Optional[bool]): μ(e)·l(e) = l'(φ(e)) everywhere, None without lengths
    """

    harmonic: bool
    non_degenerate: bool
    degree: Optional[int]
    multiplicities: Dict[VertexId, int]
    violations: List[str] = field(default_factory=list)
    metric_consistent: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return self.harmonic and self.non_degenerate and self.metric_consistent is not False

    def to_dict(self) -> Dict[str, Any]:
        """Converts the report to dictionary format"""
        return {
            "harmonic": self.harmonic,
            "non_degenerate": self.non_degenerate,
            "degree": self.degree,
            "multiplicities": dict(sorted(self.multiplicities.items())),
            "violations": list(self.violations),
            "metric_consistent": self.metric_consistent,
        }


# ============= Structure and harmonicity =============


def check_structure(phi: IndexedMorphism) -> None:
    """
    Checks the endpoint compatibility conditions of an indexed morphism.

    Raises:
        MorphismError: On the first incompatibility found
    """
    for v in phi.source.vertices:
        t = phi.vertex_map.get(v)
        if t is None or t not in phi.target.vertices:
            raise MorphismError(f"vertex {v} has no valid image")
    for e, (a, b) in phi.source.edges.items():
        index = phi.indices.get(e)
        if index is None or index < 0:
            raise MorphismError(f"edge {e} has no valid index")
        ta, tb = phi.vertex_map[a], phi.vertex_map[b]
        if e not in phi.edge_map:
            if index != 0:
                raise MorphismError(f"contracted edge {e} has index {index}")
            if ta != tb:
                raise MorphismError(f"contracted edge {e} joins vertices over {ta} and {tb}")
            continue
        te = phi.edge_map[e]
        if te not in phi.target.edges:
            raise MorphismError(f"edge {e} maps to unknown edge {te}")
        if index == 0:
            raise MorphismError(f"edge {e} maps to edge {te} with index 0")
        if sorted((ta, tb)) != sorted(phi.target.edges[te]):
            raise MorphismError(f"ends of {e} do not map to the ends of {te}")
    if phi.is_metric:
        assert phi.source_lengths is not None and phi.target_lengths is not None
        if set(phi.source_lengths) != set(phi.source.edges):
            raise MorphismError("source lengths do not match the source edges")
        if set(phi.target_lengths) != set(phi.target.edges):
            raise MorphismError("target lengths do not match the target edges")


def local_degrees(phi: IndexedMorphism, x: VertexId) -> Dict[EdgeId, int]:
    """Target edge at φ(x) -> Σ μ(e) over edges e at x mapping onto it."""
    degrees = {te: 0 for te in phi.target.incident_edges(phi.vertex_map[x])}
    for e in phi.source.incident_edges(x):
        if e in phi.edge_map:
            degrees[phi.edge_map[e]] += phi.indices[e]
    return degrees


def multiplicity(phi: IndexedMorphism, x: VertexId) -> int:
    return max(local_degrees(phi, x).values(), default=0)


def check_morphism(phi: IndexedMorphism) -> MorphismReport:
    """
    Tests harmonicity at every source vertex against every incident target edge.

    Args:
        phi: A structurally valid indexed morphism

    Returns:
        MorphismReport: Harmonicity, non-degeneracy, degree and violations

    Raises:
        MorphismError: If the morphism is structurally invalid
    """
    check_structure(phi)
    violations = []
    table = {}
    harmonic = True
    for x in sorted(phi.source.vertices):
        degrees = local_degrees(phi, x)
        table[x] = max(degrees.values(), default=0)
        if len(set(degrees.values())) > 1:
            harmonic = False
            violations.append(f"not harmonic at {x}: {dict(sorted(degrees.items()))}")
    non_degenerate = all(m >= 1 for m in table.values())
    for x, m in table.items():
        if m == 0:
            violations.append(f"degenerate at {x}")

    degree = None
    if harmonic and phi.target.edges:
        sums = {
            te: sum(phi.indices[e] for e in phi.fibre(te)) for te in sorted(phi.target.edges)
        }
        if len(set(sums.values())) == 1:
            degree = next(iter(sums.values()))
        else:
            violations.append(f"fibre sums differ: {sums}")

    metric_consistent = None
    if phi.is_metric:
        assert phi.source_lengths is not None and phi.target_lengths is not None
        metric_consistent = True
        for e, te in sorted(phi.edge_map.items()):
            if phi.indices[e] * phi.source_lengths[e] != phi.target_lengths[te]:
                metric_consistent = False
                violations.append(
                    f"length: {phi.indices[e]}*{format_fraction(phi.source_lengths[e])} != "
                    f"{format_fraction(phi.target_lengths[te])} for {e} -> {te}"
                )

    return MorphismReport(
        harmonic=harmonic,
        non_degenerate=non_degenerate,
        degree=degree,
        multiplicities=table,
        violations=violations,
        metric_consistent=metric_consistent,
    )


def horizontal_multiplicity(phi: IndexedMorphism, x: Point) -> int:
    """m_φ at a vertex, 0 inside contracted edges, μ(e) inside a non-contracted edge e."""
    if x.vertex is not None:
        return multiplicity(phi, x.vertex)
    if x.edge not in phi.source.edges:
        raise MorphismError(f"unknown edge {x.edge}")
    return phi.indices[x.edge]


def identity_morphism(m: MetricGraph) -> IndexedMorphism:
    return IndexedMorphism.between(
        m,
        m,
        vertex_map={v: v for v in m.vertices},
        edge_map={e: e for e in m.edges},
        indices={e: 1 for e in m.edges},
    )


# ============= Pullback =============


def pullback(phi: IndexedMorphism, dtgt: Divisor) -> Divisor:
    """
    φ*D': each preimage point weighted by its horizontal multiplicity.

    Raises:
        MorphismError: If phi is not harmonic, or lengths are needed but missing
    """
    report = check_morphism(phi)
    if not report.harmonic:
        raise MorphismError("pullback needs a harmonic morphism")
    chips: Dict[Point, int] = defaultdict(int)
    for p, c in dtgt.items():
        if p.vertex is not None:
            for x in phi.vertex_fibre(p.vertex):
                if report.multiplicities[x]:
                    chips[Point(vertex=x)] += report.multiplicities[x] * c
            continue
        source, target = phi.source_metric, phi.target_metric
        te = str(p.edge)
        first = target.graph.ends(te)[0]
        for e in phi.fibre(te):
            mu = phi.indices[e]
            a, b = source.graph.ends(e)
            along = p.offset / mu
            from_first = phi.vertex_map[a] == first
            offset = along if from_first else source.length(e) - along
            chips[source.point_on(e, offset)] += mu * c
    return Divisor(chips)


# ============= Contraction removal =============


def remove_contractions(phi: IndexedMorphism) -> IndexedMorphism:
    """
    Replaces every contracted edge by a fold over a new leaf of the target.

    For a contracted edge e = uv over t: a midpoint w splits e into two halves
    of length l(e)/2 mapping onto a new leaf of length l(e)/2 at t; every other
    vertex x over t gets m_φ(x) new leaves onto it, u and v get m_φ − 1 each.

    Args:
        phi: A non-degenerate harmonic metric morphism of degree at least 2

    Returns:
        IndexedMorphism: A contraction-free harmonic morphism of the same degree

    Raises:
        MorphismError: If the preconditions fail
    """
    report = check_morphism(phi)
    if not phi.is_metric:
        raise MorphismError("contraction removal needs a metric morphism")
    if not (report.harmonic and report.non_degenerate):
        raise MorphismError("contraction removal needs a non-degenerate harmonic morphism")
    if report.degree is None or report.degree < 2:
        raise MorphismError("contraction removal needs degree at least 2")
    assert phi.source_lengths is not None and phi.target_lengths is not None

    m = report.multiplicities
    src_v = dict(phi.source.vertices)
    src_e = dict(phi.source.edges)
    src_l = dict(phi.source_lengths)
    tgt_v = dict(phi.target.vertices)
    tgt_e = dict(phi.target.edges)
    tgt_l = dict(phi.target_lengths)
    vmap = dict(phi.vertex_map)
    emap = dict(phi.edge_map)
    idx = dict(phi.indices)
    folds = set(phi.folds)

    def fresh(table: Dict[str, Any], name: str) -> str:
        if name in table:
            raise MorphismError(f"id {name} already in use")
        return name

    for e in phi.contracted_edges():
        u, v = phi.source.edges[e]
        t = phi.vertex_map[u]
        half = phi.source_lengths[e] / 2
        tip = fresh(tgt_v, f"{e}.tip")
        leaf = fresh(tgt_e, f"{e}.leaf")
        tgt_v[tip] = 0
        tgt_e[leaf] = (t, tip)
        tgt_l[leaf] = half

        mid = fresh(src_v, f"{e}.mid")
        src_v[mid] = 0
        vmap[mid] = tip
        folds.add(mid)
        del src_e[e], src_l[e], idx[e]
        for name, ends in ((f"{e}.a", (u, mid)), (f"{e}.b", (mid, v))):
            fresh(src_e, name)
            src_e[name], src_l[name], emap[name], idx[name] = ends, half, leaf, 1

        for x in phi.vertex_fibre(t):
            extra = m[x] - (x == u) - (x == v)
            if extra < 0:
                raise MorphismError(f"contracted loop {e} sits at a vertex with m = {m[x]}")
            for i in range(extra):
                end = fresh(src_v, f"{e}.{x}.{i}")
                stem = fresh(src_e, f"{e}.{x}.{i}.stem")
                src_v[end] = 0
                vmap[end] = tip
                src_e[stem], src_l[stem], emap[stem], idx[stem] = (x, end), half, leaf, 1
        logger.debug(f"Removed contraction of {e} over {t}")

    result = IndexedMorphism(
        source=WeightedGraph(vertices=src_v, edges=src_e),
        target=WeightedGraph(vertices=tgt_v, edges=tgt_e),
        vertex_map=vmap,
        edge_map=emap,
        indices=idx,
        source_lengths=src_l,
        target_lengths=tgt_l,
        folds=frozenset(folds),
    )
    after = check_morphism(result)
    if not after.ok or after.degree != report.degree:
        raise MorphismError(f"contraction removal broke the morphism: {after.violations}")
    return result


# ============= Riemann–Hurwitz =============


def riemann_hurwitz_local(phi: IndexedMorphism, v: VertexId) -> Tuple[bool, int]:
    """
    Local Riemann–Hurwitz balance at a source vertex.

    Compares 2 − 2w(v) with m_φ(v)(2 − 2w(φ(v))) − Σ_{e ∋ v} (μ(e) − 1).

    Returns:
        Tuple[bool, int]: Whether both sides agree, and the defect RHS − LHS
    """
    lhs = 2 - 2 * phi.source.weight(v)
    ramification = sum(phi.indices[e] - 1 for e in phi.source.incident_edges(v))
    rhs = multiplicity(phi, v) * (2 - 2 * phi.target.weight(phi.vertex_map[v])) - ramification
    defect = rhs - lhs
    return defect == 0, defect
