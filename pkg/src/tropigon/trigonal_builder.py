"""
Trigonal Builder - Covers from Trigonal Divisors

Turns a degree-3 divisor of rank 1 on a 3-edge connected metric graph into a
non-degenerate harmonic morphism of degree 3 onto a metric tree.

Features:
- admissible representatives per canonical vertex and the set they form
- consecutive representatives and the 3-edge cuts joining them
- cover assembly on the refinement at all representative supports
- loops handled by folding each loop over a new leaf of the tree
- small-case witnesses and covers of cores on two or three vertices
- a round-trip check pulling a tree point back through the cover
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger

from .divisor_theory import (
    Divisor,
    canonical_vertices,
    find_trigonal_divisor,
    normalize_divisor,
    point_divisor,
    push_divisor,
    rank_at_least,
    reduce,
    smooth_common_edge,
)
from .errors import TrigonalBuilderError
from .graph_core import (
    EdgeCut,
    EdgeId,
    VertexId,
    WeightedGraph,
    components_without,
    is_connected_without,
    is_k_edge_connected,
)
from .harmonic_morphism import IndexedMorphism, check_morphism, pullback
from .metric_graph import (
    MetricGraph,
    Point,
    RefinementMap,
    canonical_loopless_model,
    canonical_model,
    identity_map,
    refine_at,
    remove_loops,
)


@dataclass(frozen=True)
class AdmissibleRep:
    """
    The admissible representative D_x = x + x1 + x2 of a trigonal divisor.

    Attributes:
        base (str): The canonical vertex x it was computed for
        divisor (Divisor): The representative
        bases (Tuple[str, ...]): Every canonical vertex giving this same representative
    """

    base: VertexId
    divisor: Divisor
    bases: Tuple[VertexId, ...] = ()

    def __str__(self) -> str:
        return f"D_{self.base} = {self.divisor}"

    def to_dict(self) -> Dict[str, Any]:
        """Converts the representative to dictionary format"""
        return {"base": self.base, "bases": list(self.bases), **self.divisor.to_dict()}


@dataclass(frozen=True)
class TrigonalCover:
    """
    A degree-3 harmonic morphism onto a metric tree built from a divisor.

    Attributes:
        source (MetricGraph): Refinement of the canonical model, with leaves glued on for loops
        target (MetricGraph): The metric tree
        morphism (IndexedMorphism): The cover
        provenance (Dict[str, AdmissibleRep]): Tree vertex -> representative it stands for
        base (MetricGraph): The canonical model the cover lives over
        base_map (RefinementMap): Map from the source minus glued leaves onto `base`
        attachments (Dict[str, str]): Glued leaf edge -> source vertex it hangs from
        strict (bool): True iff no leaf was glued, i.e. the source refines the base
    """

    source: MetricGraph
    target: MetricGraph
    morphism: IndexedMorphism
    provenance: Dict[VertexId, AdmissibleRep]
    base: MetricGraph
    base_map: RefinementMap
    attachments: Dict[EdgeId, VertexId] = field(default_factory=dict)
    strict: bool = True

    def retract(self, p: Point) -> Point:
        """Retraction of a source point onto the base metric graph."""
        p = self.source.normalize(p)
        if p.edge in self.attachments:
            p = Point(vertex=self.attachments[str(p.edge)])
        elif p.vertex is not None and p.vertex not in self.base_map.fine.vertices:
            stems = [e for e in self.source.graph.incident_edges(p.vertex) if e in self.attachments]
            p = Point(vertex=self.attachments[stems[0]])
        q = self.base_map.to_coarse(p)
        assert q is not None
        return q

    def to_dict(self) -> Dict[str, Any]:
        """Converts the cover to dictionary format"""
        return {
            "morphism": self.morphism.to_dict(),
            "provenance": {t: rep.to_dict() for t, rep in sorted(self.provenance.items())},
            "attachments": dict(sorted(self.attachments.items())),
            "strict": self.strict,
        }


@dataclass(frozen=True)
class SmallCaseCertificate:
    """
    Witness divisor for graphs whose canonical loopless model has 2 or 3 vertices.

    Attributes:
        vertex_count (int): 2 or 3
        divisor (Divisor): x + 2y or x + y + z
    """

    vertex_count: int
    divisor: Divisor


@dataclass
class RoundtripReport:
    """
    Result of verify_equivalence_roundtrip.

    Attributes:
        degree (int): Degree of the pulled back tree point
        rank_on_source (bool): The pullback has rank >= 1 on the cover's source
        rank_on_base (bool): Its retraction has rank >= 1 on the base graph
        fibres_match (bool): Pullbacks of tree vertices retract to their representatives
        failures (List[str]): Failed assertions
    """

    degree: int
    rank_on_source: bool
    rank_on_base: bool
    fibres_match: bool
    failures: List[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "success" if not self.failures else "error"


# ============= Representatives =============


def _check_hypotheses(m: MetricGraph, d: Divisor) -> None:
    if d.degree != 3 or not d.is_effective():
        raise TrigonalBuilderError(f"expected an effective degree-3 divisor, got {d}")
    if not is_k_edge_connected(m.graph, 3):
        raise TrigonalBuilderError("the metric graph is not 3-edge connected")
    if not rank_at_least(m, d, 1):
        raise TrigonalBuilderError(f"divisor {d} does not have rank >= 1")


def _admissible_divisor(m: MetricGraph, d: Divisor, x: VertexId) -> Divisor:
    here = point_divisor(Point(vertex=x))
    reduced = reduce(m, d, Point(vertex=x))
    if reduced[Point(vertex=x)] < 1:
        raise TrigonalBuilderError(f"the {x}-reduced divisor {reduced} has no chip at {x}")
    return smooth_common_edge(m, reduced - here) + here


def admissible_rep(m: MetricGraph, d: Divisor, x: VertexId) -> AdmissibleRep:
    """
    The unique admissible representative of d based at the canonical vertex x.

    Computed as the x-reduced divisor with one chip at x held back while the
    remaining two chips are smoothed off any shared canonical edge.

    Raises:
        TrigonalBuilderError: If d is not a rank-1 degree-3 divisor on a 3-edge
            connected graph, or x is not a canonical vertex
    """
    d = normalize_divisor(m, d)
    canonical, cmap = canonical_model(m)
    if x not in canonical.vertices:
        raise TrigonalBuilderError(f"{x} is not a vertex of the canonical model")
    _check_hypotheses(canonical, push_divisor(cmap, d))
    return AdmissibleRep(base=x, divisor=_admissible_divisor(m, d, x), bases=(x,))


def all_admissible_reps(m: MetricGraph, d: Divisor) -> List[AdmissibleRep]:
    """
    One admissible representative per canonical vertex, deduplicated.

    Raises:
        TrigonalBuilderError: On failed hypotheses, or when two distinct
            representatives share a support point
    """
    d = normalize_divisor(m, d)
    canonical, cmap = canonical_model(m)
    _check_hypotheses(canonical, push_divisor(cmap, d))
    return _representatives(m, d, sorted(canonical.vertices))


def _representatives(m: MetricGraph, d: Divisor, bases: List[VertexId]) -> List[AdmissibleRep]:
    found: Dict[Divisor, List[VertexId]] = {}
    for x in bases:
        found.setdefault(_admissible_divisor(m, d, x), []).append(x)
    reps = [AdmissibleRep(base=xs[0], divisor=rep, bases=tuple(xs)) for rep, xs in found.items()]
    reps.sort(key=lambda rep: rep.base)
    for i, first in enumerate(reps):
        for second in reps[i + 1 :]:
            shared = set(first.divisor.support) & set(second.divisor.support)
            if shared:
                raise TrigonalBuilderError(
                    f"representatives {first} and {second} share {sorted(map(str, shared))}"
                )
    logger.debug(f"{len(reps)} admissible representatives from {len(bases)} vertices")
    return reps


def consecutive(
    refined: MetricGraph, rmap: RefinementMap, r1: AdmissibleRep, r2: AdmissibleRep
) -> Optional[EdgeCut]:
    """
    The edges of the support refinement joining the supports of two representatives.

    Args:
        refined: Refinement containing every support point as a vertex
        rmap: Its map onto the graph the representatives live on
        r1: First representative
        r2: Second representative

    Returns:
        Optional[EdgeCut]: The three joining edges, or None if the two are not consecutive

    Raises:
        TrigonalBuilderError: If the joining edges are not three disconnecting
            edges of equal length meeting each support point as often as its chips
    """
    if r1.divisor == r2.divisor:
        raise TrigonalBuilderError("a representative is not consecutive to itself")
    first = {str(rmap.to_fine(p).vertex): p for p in r1.divisor.support}
    second = {str(rmap.to_fine(p).vertex): p for p in r2.divisor.support}
    joining = sorted(
        e
        for e, (a, b) in refined.edges.items()
        if (a in first and b in second) or (a in second and b in first)
    )
    if not joining:
        return None
    lengths = {refined.length(e) for e in joining}
    if len(joining) != 3 or len(lengths) != 1:
        raise TrigonalBuilderError(
            f"{r1} and {r2} are joined by {len(joining)} edges of lengths {sorted(lengths)}"
        )
    if is_connected_without(refined.graph, joining):
        raise TrigonalBuilderError(f"edges {joining} joining {r1} and {r2} do not disconnect")
    for support, rep in ((first, r1), (second, r2)):
        for v, p in support.items():
            count = sum(v in refined.edges[e] for e in joining)
            if count != rep.divisor[p]:
                raise TrigonalBuilderError(
                    f"{count} cut edges at {p}, but {rep} has {rep.divisor[p]} chips there"
                )
    sides = sorted((frozenset(c) for c in components_without(refined.graph, set(joining))), key=min)
    return EdgeCut(edges=frozenset(joining), sides=(sides[0], sides[1]))


# ============= Cover assembly =============


def _assemble_cover(m: MetricGraph, d: Divisor, verify: bool = True) -> TrigonalCover:
    """
    Cover of a loopless canonical graph from the supports of all representatives.

    With verify=False a single representative is accepted: everything is
    contracted onto one tree vertex and the caller adds the edges.
    """
    reps = _representatives(m, d, sorted(m.vertices))
    points = [p for rep in reps for p in rep.divisor.support]
    refined, rmap = refine_at(m, points)

    owner: Dict[VertexId, int] = {}
    for i, rep in enumerate(reps):
        for p in rep.divisor.support:
            owner[str(rmap.to_fine(p).vertex)] = i
    missing = sorted(set(refined.vertices) - set(owner))
    if missing:
        raise TrigonalBuilderError(f"vertices {missing} lie in no representative")

    tree_vertices = {f"t{i}": 0 for i in range(len(reps))}
    tree_edges: Dict[EdgeId, Tuple[VertexId, VertexId]] = {}
    tree_lengths: Dict[EdgeId, Fraction] = {}
    edge_map: Dict[EdgeId, EdgeId] = {}
    indices: Dict[EdgeId, int] = {}
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            cut = consecutive(refined, rmap, reps[i], reps[j])
            if cut is None:
                continue
            name = f"s{len(tree_edges)}"
            tree_edges[name] = (f"t{i}", f"t{j}")
            tree_lengths[name] = refined.length(min(cut.edges))
            for e in cut.edges:
                edge_map[e] = name
                indices[e] = 1
    for e in refined.edges:
        indices.setdefault(e, 0)

    if len(tree_edges) != len(tree_vertices) - 1:
        raise TrigonalBuilderError(
            f"{len(tree_vertices)} representatives joined by {len(tree_edges)} cuts: not a tree"
        )
    try:
        tree = MetricGraph(
            graph=WeightedGraph(vertices=tree_vertices, edges=tree_edges), lengths=tree_lengths
        )
    except Exception as e:
        raise TrigonalBuilderError(f"representatives do not form a tree: {str(e)}") from e

    morphism = IndexedMorphism.between(
        refined,
        tree,
        vertex_map={v: f"t{i}" for v, i in owner.items()},
        edge_map=edge_map,
        indices=indices,
    )
    if verify:
        _verify_degree_three(morphism)
    return TrigonalCover(
        source=refined,
        target=tree,
        morphism=morphism,
        provenance={f"t{i}": rep for i, rep in enumerate(reps)},
        base=m,
        base_map=rmap,
    )


def _verify_degree_three(morphism: IndexedMorphism) -> None:
    report = check_morphism(morphism)
    if not report.ok or (morphism.target.edges and report.degree != 3):
        raise TrigonalBuilderError(
            f"assembled morphism is not a degree-3 cover: {report.violations}"
        )


def _canonical_divisor(m: MetricGraph, d: Divisor) -> Tuple[MetricGraph, Divisor]:
    canonical, cmap = canonical_model(m)
    return canonical, push_divisor(cmap, normalize_divisor(m, d))


def build_trigonal_cover(m: MetricGraph, d: Divisor) -> TrigonalCover:
    """
    Non-degenerate harmonic degree-3 morphism from a refinement of the canonical model.

    Args:
        m: A 3-edge connected metric graph whose canonical model is loopless
            and has more than three vertices
        d: Effective degree-3 divisor of rank at least 1

    Returns:
        TrigonalCover: The cover, with one tree vertex per admissible representative

    Raises:
        TrigonalBuilderError: If a hypothesis or a runtime verification fails
    """
    canonical, dc = _canonical_divisor(m, d)
    if canonical.graph.loops():
        raise TrigonalBuilderError("canonical model has loops, use build_trigonal_cover_with_loops")
    if len(canonical.vertices) <= 3:
        raise TrigonalBuilderError("canonical model has at most three vertices")
    _check_hypotheses(canonical, dc)
    try:
        cover = _assemble_cover(canonical, dc)
    except TrigonalBuilderError as e:
        logger.error(f"Cover assembly failed: {str(e)}")
        raise
    logger.info(
        f"Built a degree-3 cover onto a tree with {len(cover.target.vertices)} vertices"
    )
    return cover


def _loop_representative(m: MetricGraph, d: Divisor, x: VertexId) -> Point:
    """Returns y with d ~ 2x + y, checking that y avoids the interiors of loops."""
    rep = _admissible_divisor(m, d, x)
    here = Point(vertex=x)
    if rep[here] < 2:
        raise TrigonalBuilderError(
            f"representative {rep} at loop vertex {x} has fewer than 2 chips"
        )
    rest = rep - point_divisor(here, 2)
    (y,) = rest.support
    if y.edge is not None and m.graph.is_loop(y.edge):
        raise TrigonalBuilderError(f"representative {rep} puts a chip inside a loop")
    return y


SMALL_CORE_FAMILIES = {
    (3,): "three_parallel",
    (0, 3, 3): "parallel_chain",
    (1, 2, 2): "split_triangle",
}


def small_core_family(core: MetricGraph) -> str:
    """
    Names the family of a loop-free core on two or three vertices.

    The family is read off the number of parallel edges between each pair of
    vertices:

    - three_parallel: two vertices joined by three edges, with loops at one
      or both of them in the full graph
    - parallel_chain: a-b and b-c each joined by three edges
    - split_triangle: a triangle whose sides carry 2, 2 and 1 edges

    Edges over one tree edge must share a length; that is left to the
    runtime checks of the cover.

    Raises:
        TrigonalBuilderError: If the core has loops or fits none of the families
    """
    vertices = sorted(core.vertices)
    if core.graph.loops():
        raise TrigonalBuilderError(f"core has loops {core.graph.loops()}")
    if len(vertices) not in (2, 3):
        raise TrigonalBuilderError(f"small core must have 2 or 3 vertices, got {len(vertices)}")
    pairs = [(a, b) for i, a in enumerate(vertices) for b in vertices[i + 1 :]]
    counts = {pair: 0 for pair in pairs}
    for a, b in core.edges.values():
        counts[(min(a, b), max(a, b))] += 1
    pattern = tuple(sorted(counts.values()))
    if pattern not in SMALL_CORE_FAMILIES:
        raise TrigonalBuilderError(
            f"core outside the supported small-core families: parallel classes {pattern}"
        )
    return SMALL_CORE_FAMILIES[pattern]


def small_core_cover(core: MetricGraph, d: Divisor, verify: bool = True) -> TrigonalCover:
    """
    Cover of a loop-free core with two or three vertices.

    The core is matched against the small-core families first; each family's
    parallel classes become the fibres of the tree edges, found by the
    representative construction without its vertex-count precondition.

    Raises:
        TrigonalBuilderError: If the core is not one of the families, or the
            cover fails its runtime checks
    """
    family = small_core_family(core)
    logger.debug(f"Small core of family {family}")
    try:
        return _assemble_cover(core, d, verify=verify)
    except TrigonalBuilderError as e:
        logger.warning(f"Core outside the supported small-core families: {str(e)}")
        raise TrigonalBuilderError(
            f"core outside the supported small-core families: {str(e)}"
        ) from e


def _single_vertex_cover(core: MetricGraph, d: Divisor) -> TrigonalCover:
    (x,) = core.vertices
    tree = MetricGraph(graph=WeightedGraph(vertices={"t0": 0}, edges={}), lengths={})
    morphism = IndexedMorphism.between(core, tree, {x: "t0"}, {}, {})
    rep = AdmissibleRep(base=x, divisor=d, bases=(x,))
    return TrigonalCover(
        source=core,
        target=tree,
        morphism=morphism,
        provenance={"t0": rep},
        base=core,
        base_map=identity_map(core),
    )


def build_trigonal_cover_with_loops(m: MetricGraph, d: Divisor) -> TrigonalCover:
    """
    Degree-3 cover of a 3-edge connected metric graph whose canonical model may have loops.

    The loop-free core receives a cover first. Then every loop at x, where
    d ~ 2x + y, is cut at its midpoint, a leaf of half the loop's length is
    glued at y, and both halves together with the leaf fold onto a new leaf of
    the tree at the image of x.

    Raises:
        TrigonalBuilderError: If a hypothesis or a runtime verification fails
    """
    canonical, dc = _canonical_divisor(m, d)
    loops = canonical.graph.loops()
    if not loops:
        if len(canonical.vertices) <= 3:
            _check_hypotheses(canonical, dc)
            return small_core_cover(canonical, dc)
        return build_trigonal_cover(m, d)
    _check_hypotheses(canonical, dc)

    loop_vertices = sorted({canonical.edges[e][0] for e in loops})
    partners = {x: _loop_representative(canonical, dc, x) for x in loop_vertices}
    x0 = loop_vertices[0]
    core = remove_loops(canonical)
    core_divisor = point_divisor(Point(vertex=x0), 2) + point_divisor(partners[x0])

    if len(core.vertices) == 1:
        core_cover = _single_vertex_cover(core, core_divisor)
    elif len(core.vertices) <= 3:
        core_cover = small_core_cover(core, core_divisor, verify=False)
    else:
        core_cover = _assemble_cover(core, core_divisor, verify=False)

    src = core_cover.source
    phi = core_cover.morphism
    src_v, src_e, src_l = dict(src.vertices), dict(src.edges), dict(src.lengths)
    tgt = core_cover.target
    tgt_v, tgt_e, tgt_l = dict(tgt.vertices), dict(tgt.edges), dict(tgt.lengths)
    vmap, emap, idx = dict(phi.vertex_map), dict(phi.edge_map), dict(phi.indices)
    paths = dict(core_cover.base_map.paths)
    attachments: Dict[EdgeId, VertexId] = {}
    tips = set()

    for loop in loops:
        x = canonical.edges[loop][0]
        y = core_cover.base_map.to_fine(partners[x]).vertex
        if y is None or y not in src_v:
            raise TrigonalBuilderError(f"partner {partners[x]} of {x} is not a cover vertex")
        half = canonical.length(loop) / 2
        mid, tip, stem, leaf = f"{loop}.mid", f"{loop}.tip", f"{loop}.stem", f"{loop}.leaf"
        for name, table in ((mid, src_v), (tip, src_v), (stem, src_e), (tip, tgt_v), (leaf, tgt_e)):
            if name in table:
                raise TrigonalBuilderError(f"id {name} already in use")
        src_v[mid] = src_v[tip] = tgt_v[tip] = 0
        tgt_e[leaf], tgt_l[leaf] = (vmap[x], tip), half
        pieces = ((f"{loop}.a", (x, mid)), (f"{loop}.b", (mid, x)), (stem, (y, tip)))
        for name, ends in pieces:
            src_e[name], src_l[name], emap[name], idx[name] = ends, half, leaf, 1
        vmap[mid] = vmap[tip] = tip
        paths[loop] = ((f"{loop}.a", False), (f"{loop}.b", False))
        attachments[stem] = y
        tips.add(tip)
        logger.debug(f"Folded loop {loop} at {x} with a leaf at {y}")

    source = MetricGraph(graph=WeightedGraph(vertices=src_v, edges=src_e), lengths=src_l)
    target = MetricGraph(graph=WeightedGraph(vertices=tgt_v, edges=tgt_e), lengths=tgt_l)
    morphism = IndexedMorphism.between(source, target, vmap, emap, idx)
    _verify_degree_three(morphism)
    unglued = {e: ends for e, ends in src_e.items() if e not in attachments}
    fine = MetricGraph(
        graph=WeightedGraph(
            vertices={v: w for v, w in src_v.items() if v not in tips},
            edges=unglued,
        ),
        lengths={e: src_l[e] for e in unglued},
    )
    logger.info(f"Built a degree-3 cover with {len(loops)} folded loops")
    return TrigonalCover(
        source=source,
        target=target,
        morphism=morphism,
        provenance=core_cover.provenance,
        base=canonical,
        base_map=RefinementMap(fine=fine, coarse=canonical, paths=paths),
        attachments=attachments,
        strict=False,
    )


# ============= Small cases and front door =============


def small_case_witness(m: MetricGraph) -> SmallCaseCertificate:
    """
    x + 2y when the canonical loopless model has two vertices, x + y + z when it has three.

    Raises:
        TrigonalBuilderError: If the vertex count is not 2 or 3, or the witness
            fails the rank check
    """
    loopless, lmap = canonical_loopless_model(m)
    _, cmap = canonical_model(m)
    count = len(loopless.vertices)
    if count not in (2, 3):
        raise TrigonalBuilderError(
            f"canonical loopless model has {count} vertices, expected 2 or 3"
        )
    points = []
    for v in sorted(loopless.vertices):
        coarse = lmap.to_coarse(Point(vertex=v))
        assert coarse is not None
        points.append(cmap.to_fine(coarse))
    witness = Divisor.of([points[0], points[1], points[1]] if count == 2 else points)
    if not rank_at_least(m, witness, 1):
        raise TrigonalBuilderError(f"witness {witness} does not have rank >= 1")
    return SmallCaseCertificate(vertex_count=count, divisor=witness)


def trigonal_cover(m: MetricGraph, d: Optional[Divisor] = None) -> TrigonalCover:
    """
    Builds a degree-3 cover, choosing the construction that fits m.

    Without a divisor, small graphs use their small-case witness and larger ones
    the heuristic search.

    Raises:
        TrigonalBuilderError: If no divisor is given and none can be found
    """
    if d is None:
        loopless, _ = canonical_loopless_model(m)
        if len(loopless.vertices) <= 3:
            return _small_graph_cover(m)
        else:
            d = find_trigonal_divisor(m)
        if d is None:
            raise TrigonalBuilderError("no trigonal divisor found")
    return build_trigonal_cover_with_loops(m, d)


def _small_graph_cover(m: MetricGraph) -> TrigonalCover:
    """Tries the small-case witness, then 3v at each canonical vertex v."""
    candidates = [small_case_witness(m).divisor]
    candidates += [point_divisor(p, 3) for p in canonical_vertices(m)]
    failures = []
    for d in candidates:
        try:
            return build_trigonal_cover_with_loops(m, d)
        except TrigonalBuilderError as e:
            logger.debug(f"No cover from {d}: {str(e)}")
            failures.append(str(e))
    raise TrigonalBuilderError(f"no small-case divisor gives a cover: {failures[0]}")


def trigonal_via_search(m: MetricGraph) -> Optional[TrigonalCover]:
    d = find_trigonal_divisor(m)
    if d is None:
        return None
    return trigonal_cover(m, d)


# ============= Verification =============


def verify_equivalence_roundtrip(m: MetricGraph, d: Divisor) -> RoundtripReport:
    """
    Pulls back a generic tree point through the cover built from d and checks its rank.

    Returns:
        RoundtripReport: Degrees, rank checks and fibre comparison
    """
    cover = trigonal_cover(m, d)
    if not cover.target.edges:
        raise TrigonalBuilderError("cover onto a single point has no generic tree point")
    failures = []
    edge = min(cover.target.edges)
    tree_point = cover.target.point_on(edge, cover.target.length(edge) / 2)
    pulled = pullback(cover.morphism, point_divisor(tree_point))
    if pulled.degree != 3:
        failures.append(f"pullback {pulled} has degree {pulled.degree}")
    on_source = rank_at_least(cover.source, pulled, 1)
    if not on_source:
        failures.append("pullback has rank < 1 on the cover's source")
    retracted = Divisor.of(cover.retract(p) for p, c in pulled.items() for _ in range(c))
    on_base = rank_at_least(cover.base, retracted, 1)
    if not on_base:
        failures.append("retracted pullback has rank < 1 on the base graph")

    fibres_match = True
    for t, rep in sorted(cover.provenance.items()):
        fibre = pullback(cover.morphism, point_divisor(Point(vertex=t)))
        back = Divisor.of(cover.retract(p) for p, c in fibre.items() for _ in range(c))
        if back != rep.divisor:
            fibres_match = False
            failures.append(f"fibre over {t} retracts to {back}, expected {rep.divisor}")

    return RoundtripReport(
        degree=pulled.degree,
        rank_on_source=on_source,
        rank_on_base=on_base,
        fibres_match=fibres_match,
        failures=failures,
    )
