"""
Moduli Cells - Trigonal Types, 3-Ladders and Maximal Cells

Combinatorial side of the moduli space of 3-edge connected trigonal curves.

Features:
- trigonal types (G, w, φ) with validation and isomorphism signatures
- the edge relation of a type and its cone of admissible edge lengths
- φ-contractions of one or more classes
- 3-ladders over trees of maximal valence 3 and their modifications
- maximal cells per genus, facets and codimension-1 adjacency
- local Riemann–Hurwitz certification of ladder covers
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx
import sympy
from loguru import logger

from . import config
from .errors import ModuliError, MorphismError
from .graph_core import (
    EdgeId,
    Stabilization,
    VertexId,
    WeightedGraph,
    are_isomorphic,
    contract_edges_with_map,
    genus,
    graph_hash,
    is_k_edge_connected,
    is_stable,
    stabilize_with_chains,
    valence,
)
from .harmonic_morphism import (
    IndexedMorphism,
    check_morphism,
    multiplicity,
    remove_contractions,
    riemann_hurwitz_local,
)
from .metric_graph import Rational, as_fraction

COPIES = (1, 2, 3)
PAIRS = ((1, 2), (1, 3), (2, 3))


# ============= Trigonal types =============


@dataclass(frozen=True)
class TrigonalType:
    """
    A trigonal type (G, w, φ): a stable graph and a degree-3 cover φ: G_φ → T.

    Attributes:
        morphism (IndexedMorphism): φ from a refinement-with-trees G_φ onto a tree
        stabilization (Stabilization): (G_φ)^st with the chains of G_φ edges it is built from
    """

    morphism: IndexedMorphism
    stabilization: Stabilization

    @classmethod
    def of(cls, morphism: IndexedMorphism) -> "TrigonalType":
        return cls(morphism=morphism, stabilization=stabilize_with_chains(morphism.source))

    @property
    def stable(self) -> WeightedGraph:
        return self.stabilization.graph

    @property
    def source(self) -> WeightedGraph:
        return self.morphism.source

    @property
    def tree(self) -> WeightedGraph:
        return self.morphism.target

    @property
    def genus(self) -> int:
        return genus(self.stable)

    def loop_chain_vertices(self) -> List[VertexId]:
        """Interior vertices of the chains that make up loops of the stable graph."""
        inner = []
        for e, chain in self.stabilization.chains.items():
            a, b = self.stable.edges[e]
            if a != b:
                continue
            for piece, rev in chain[:-1]:
                first, second = self.source.edges[piece]
                inner.append(first if rev else second)
        return sorted(inner)

    def validate(self) -> List[str]:
        """
        Checks the defining conditions of a 3-edge connected trigonal type.

        Returns:
            List[str]: Violations found, empty for a valid type
        """
        problems = []
        if not self.tree.edges:
            problems.append("target tree is a single vertex")
        elif len(self.tree.edges) != len(self.tree.vertices) - 1:
            problems.append("target is not a tree")
        try:
            report = check_morphism(self.morphism)
        except MorphismError as e:
            return problems + [str(e)]
        if not report.ok:
            problems.extend(report.violations)
        elif self.tree.edges and report.degree != 3:
            problems.append(f"degree is {report.degree}, expected 3")
        if not is_stable(self.stable):
            problems.append("stabilization is not stable")
        if not is_k_edge_connected(self.stable, 3):
            problems.append("stable graph is not 3-edge connected")
        allowed = set(self.stable.vertices) | set(self.loop_chain_vertices())
        for t in sorted(self.tree.vertices):
            if not allowed.intersection(self.morphism.vertex_fibre(t)):
                problems.append(f"no vertex of the stable model lies over {t}")
        return problems

    def to_dict(self) -> Dict[str, Any]:
        """Converts the type to dictionary format"""
        return {
            "stable": self.stable.to_dict(),
            "chains": {
                e: [[piece, rev] for piece, rev in chain]
                for e, chain in sorted(self.stabilization.chains.items())
            },
            "morphism": self.morphism.to_dict(),
        }


@dataclass(frozen=True)
class EdgeRelation:
    """
    The relation ~_φ on E(G_φ) and what it induces on E(G).

    Attributes:
        classes (Tuple[FrozenSet[str], ...]): Fibres over tree edges, then vertical singletons
        images (Tuple[str, ...]): Tree edge of each fibre class, or tree vertex of a vertical one
        vertical (Tuple[bool, ...]): Whether each class is a contracted singleton
        equal (Tuple[FrozenSet[str], ...]): Groups of stable edges forced to equal length
        leq (Tuple[Tuple[str, str], ...]): Pairs (e, f) of stable edges with l(e) <= l(f)
    """

    classes: Tuple[FrozenSet[EdgeId], ...]
    images: Tuple[str, ...]
    vertical: Tuple[bool, ...]
    equal: Tuple[FrozenSet[EdgeId], ...] = ()
    leq: Tuple[Tuple[EdgeId, EdgeId], ...] = ()

    def class_of(self, e: EdgeId) -> int:
        for i, members in enumerate(self.classes):
            if e in members:
                return i
        raise ModuliError(f"edge {e} is in no class")

    def constraints(self, phi: IndexedMorphism) -> List[str]:
        """The equalities μ(e_i)l(e_i) = μ(e_j)l(e_j) within each fibre class."""
        found = []
        for members, is_vertical in zip(self.classes, self.vertical):
            if is_vertical:
                continue
            ordered = sorted(members)
            for a, b in zip(ordered, ordered[1:]):
                found.append(f"{phi.indices[a]}*l({a}) = {phi.indices[b]}*l({b})")
        return found


@dataclass(frozen=True)
class ConeDescriptor:
    """
    Cone of edge lengths on G realised by a trigonal type.

    Attributes:
        classes (Tuple[FrozenSet[str], ...]): One length parameter per class of ~_φ
        stable_edges (Tuple[str, ...]): Row order of `matrix`
        matrix (Tuple[Tuple[Fraction, ...], ...]): Class parameters -> stable edge lengths
        dimension (int): Rank of `matrix`
    """

    classes: Tuple[FrozenSet[EdgeId], ...]
    stable_edges: Tuple[EdgeId, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]
    dimension: int


def _classes(tt: TrigonalType) -> Tuple[List[FrozenSet[EdgeId]], List[str], List[bool]]:
    phi = tt.morphism
    classes, images, vertical = [], [], []
    for te in sorted(phi.target.edges):
        members = frozenset(phi.fibre(te))
        if members:
            classes.append(members)
            images.append(te)
            vertical.append(False)
    for e in phi.contracted_edges():
        classes.append(frozenset([e]))
        images.append(phi.vertex_map[phi.source.edges[e][0]])
        vertical.append(True)
    return classes, images, vertical


def _length_rows(
    tt: TrigonalType, classes: List[FrozenSet[EdgeId]]
) -> Tuple[List[EdgeId], List[Tuple[Fraction, ...]]]:
    column = {e: i for i, members in enumerate(classes) for e in members}
    stable_edges = sorted(tt.stable.edges)
    rows = []
    for e in stable_edges:
        row = [Fraction(0)] * len(classes)
        for piece, _ in tt.stabilization.chains[e]:
            mu = tt.morphism.indices[piece]
            row[column[piece]] += Fraction(1, mu) if mu else Fraction(1)
        rows.append(tuple(row))
    return stable_edges, rows


def edge_relation(tt: TrigonalType) -> EdgeRelation:
    """
    Classes of ~_φ and the equalities and inequalities they force on stable edges.

    Two stable edges have equal length for every length function of the cone
    when their refinement pieces are the same multiset of class parameters; one
    is at most the other when its pieces are contained in the other's.
    """
    classes, images, vertical = _classes(tt)
    stable_edges, rows = _length_rows(tt, classes)

    groups: Dict[Tuple[Fraction, ...], List[EdgeId]] = {}
    for e, row in zip(stable_edges, rows):
        groups.setdefault(row, []).append(e)
    equal = tuple(frozenset(members) for members in groups.values() if len(members) > 1)

    leq = []
    for (e, r), (f, s) in product(zip(stable_edges, rows), repeat=2):
        if r != s and all(a <= b for a, b in zip(r, s)):
            leq.append((e, f))
    return EdgeRelation(
        classes=tuple(classes),
        images=tuple(images),
        vertical=tuple(vertical),
        equal=equal,
        leq=tuple(sorted(leq)),
    )


def cone_descriptor(tt: TrigonalType) -> ConeDescriptor:
    """
    Dimension of the cone of a type: rank of the class-lengths to edge-lengths map.

    Returns:
        ConeDescriptor: Classes, the linear map and its rank
    """
    classes, _, _ = _classes(tt)
    stable_edges, rows = _length_rows(tt, classes)
    matrix = sympy.Matrix(
        [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows]
    )
    dimension = int(matrix.rank()) if rows and classes else 0
    return ConeDescriptor(
        classes=tuple(classes),
        stable_edges=tuple(stable_edges),
        matrix=tuple(rows),
        dimension=dimension,
    )


# ============= Signatures =============


def type_signature(tt: TrigonalType) -> nx.Graph:
    """Labelled graph encoding G_φ, T, φ, the indices and the weights."""
    phi = tt.morphism
    sig = nx.Graph()
    for v, w in phi.source.vertices.items():
        sig.add_node(("s", v), label=f"s:{w}")
    for t, w in phi.target.vertices.items():
        sig.add_node(("t", t), label=f"t:{w}")
    for te, (a, b) in phi.target.edges.items():
        sig.add_node(("te", te), label="te")
        sig.add_edge(("te", te), ("t", a), label="end")
        sig.add_edge(("te", te), ("t", b), label="end")
    for e, (a, b) in phi.source.edges.items():
        sig.add_node(("se", e), label=f"se:{phi.indices[e]}")
        sig.add_edge(("se", e), ("s", a), label="loop" if a == b else "end")
        sig.add_edge(("se", e), ("s", b), label="loop" if a == b else "end")
        kind, image = phi.image(e)
        sig.add_edge(("se", e), ("te" if kind == "edge" else "t", image), label="map")
    for v, t in phi.vertex_map.items():
        sig.add_edge(("s", v), ("t", t), label="map")
    return sig


def cone_signature(tt: TrigonalType) -> nx.Graph:
    """Labelled graph encoding the stable graph and how class parameters build its edges."""
    classes, _, _ = _classes(tt)
    stable_edges, rows = _length_rows(tt, classes)
    sig = nx.Graph()
    for v, w in tt.stable.vertices.items():
        sig.add_node(("v", v), label=f"v:{w}")
    for e, row in zip(stable_edges, rows):
        a, b = tt.stable.edges[e]
        sig.add_node(("e", e), label="e")
        sig.add_edge(("e", e), ("v", a), label="loop" if a == b else "end")
        sig.add_edge(("e", e), ("v", b), label="loop" if a == b else "end")
        for i, coefficient in enumerate(row):
            if coefficient:
                sig.add_node(("c", i), label="c")
                sig.add_edge(("e", e), ("c", i), label=str(coefficient))
    return sig


def signature_hash(sig: nx.Graph) -> str:
    return str(nx.weisfeiler_lehman_graph_hash(sig, node_attr="label", edge_attr="label"))


def same_signature(a: nx.Graph, b: nx.Graph) -> bool:
    """VF2 isomorphism test of two labelled signature graphs."""
    same = lambda x, y: x["label"] == y["label"]  # noqa: E731
    return bool(nx.is_isomorphic(a, b, node_match=same, edge_match=same))


def are_isomorphic_types(t1: TrigonalType, t2: TrigonalType) -> bool:
    return same_signature(type_signature(t1), type_signature(t2))


def _dedup(items: Iterable[Any], signature: Callable[[Any], nx.Graph]) -> List[Any]:
    buckets: Dict[str, List[Tuple[Any, nx.Graph]]] = {}
    kept = []
    for item in items:
        sig = signature(item)
        bucket = buckets.setdefault(signature_hash(sig), [])
        if any(same_signature(sig, other) for _, other in bucket):
            continue
        bucket.append((item, sig))
        kept.append(item)
    return kept


# ============= φ-contractions =============


def _contract_class(tt: TrigonalType, members: FrozenSet[EdgeId]) -> TrigonalType:
    phi = tt.morphism
    src = phi.source
    images = {phi.image(e) for e in members}
    if len(images) != 1:
        raise ModuliError(f"edges {sorted(members)} do not form one class")
    kind, image = images.pop()
    if kind == "vertex" and len(members) != 1:
        raise ModuliError(f"vertical class {sorted(members)} must be a single edge")

    multiplicities = check_morphism(phi).multiplicities
    contracted, rename = contract_edges_with_map(src, members)
    if kind == "edge":
        tree, tree_rename = contract_edges_with_map(phi.target, [image])
    else:
        tree, tree_rename = phi.target, {t: t for t in phi.target.vertices}

    vmap = {rename[x]: tree_rename[t] for x, t in phi.vertex_map.items()}
    emap = {e: te for e, te in phi.edge_map.items() if e not in members}
    idx = {e: k for e, k in phi.indices.items() if e not in members}

    # m over the contracted morphism, before any leaf is added
    merged: Dict[VertexId, Dict[VertexId, int]] = {}
    for x, m in multiplicities.items():
        side = merged.setdefault(rename[x], {})
        side[phi.vertex_map[x]] = side.get(phi.vertex_map[x], 0) + m
    new_m = {p: max(sides.values()) for p, sides in merged.items()}

    src_v, src_e = dict(contracted.vertices), dict(contracted.edges)
    tgt_v, tgt_e = dict(tree.vertices), dict(tree.edges)
    new_loops = [
        f for f, (a, b) in contracted.edges.items() if a == b and src.edges[f][0] != src.edges[f][1]
    ]
    for f in sorted(new_loops):
        if f in emap:
            raise ModuliError(f"contraction turned the horizontal edge {f} into a loop")
        p = src_e[f][0]
        v = vmap[p]
        if new_m[p] == 3:
            anchor = p
        elif new_m[p] == 2:
            others = sorted(q for q in src_v if q != p and vmap[q] == v and new_m.get(q) == 1)
            if not others:
                raise ModuliError(f"no vertex over {v} can carry the leaf of loop {f}")
            anchor = others[0]
        else:
            raise ModuliError(f"loop {f} at {p} with m = {new_m[p]} cannot be folded")
        mid, tip, leaf = f"{f}.mid", f"{f}.tip", f"{f}.leaf"
        for name in (mid, tip):
            if name in src_v or name in tgt_v:
                raise ModuliError(f"id {name} already in use")
        del src_e[f], idx[f]
        src_v[mid] = src_v[tip] = tgt_v[tip] = 0
        new_m[mid], new_m[tip] = 2, 1
        tgt_e[leaf] = (v, tip)
        vmap[mid] = vmap[tip] = tip
        halves = ((f"{f}.a", (p, mid)), (f"{f}.b", (mid, p)), (f"{f}.stem", (anchor, tip)))
        for name, ends in halves:
            src_e[name], emap[name], idx[name] = ends, leaf, 1
        logger.debug(f"Loop {f} at {p} folded over a new leaf, third sheet at {anchor}")

    morphism = IndexedMorphism(
        source=WeightedGraph(vertices=src_v, edges=src_e),
        target=WeightedGraph(vertices=tgt_v, edges=tgt_e),
        vertex_map=vmap,
        edge_map=emap,
        indices=idx,
    )
    return TrigonalType.of(morphism)


def phi_contract(tt: TrigonalType, cls: Iterable[EdgeId]) -> TrigonalType:
    """
    Contracts a union of ~_φ classes and repairs the cover around any new loops.

    Every loop created by the contraction is split at a midpoint; both halves
    and a new leaf map onto a new leaf of the tree. The leaf hangs at the loop's
    vertex when its multiplicity is 3, otherwise at the vertex of multiplicity 1
    over the same tree vertex.

    Args:
        tt: A valid trigonal type
        cls: Edges of G_φ forming a union of classes; empty gives tt back

    Returns:
        TrigonalType: The contracted type

    Raises:
        ModuliError: If cls is not a union of classes or the result is not a valid type
    """
    selection = set(cls)
    if not selection:
        return tt
    relation = edge_relation(tt)
    chosen = []
    for members in relation.classes:
        if members & selection:
            if not members <= selection:
                raise ModuliError(f"selection splits the class {sorted(members)}")
            chosen.append(members)
    unknown = selection - set().union(*chosen) if chosen else selection
    if unknown:
        raise ModuliError(f"unknown edges {sorted(unknown)}")

    result = tt
    for members in chosen:
        present = set(result.source.edges)
        current = set()
        for e in members:
            if e in present:
                current.add(e)
            elif f"{e}.a" in present:
                leaf = result.morphism.edge_map[f"{e}.a"]
                current.update(result.morphism.fibre(leaf))
        if current:
            result = _contract_class(result, frozenset(current))

    problems = result.validate()
    if problems:
        raise ModuliError(f"φ-contraction is not a trigonal type: {problems}")
    if result.genus != tt.genus:
        raise ModuliError(f"φ-contraction changed the genus from {tt.genus} to {result.genus}")
    return result


# ============= 3-ladders =============


@dataclass(frozen=True)
class ThreeLadder:
    """
    A 3-ladder G_T over a tree T with its cover φ_T.

    Copies of a tree vertex v are named '<v>.1', '<v>.2', '<v>.3'; the copies of
    a tree edge e are '<e>.1', '<e>.2', '<e>.3'; the vertical edge joining copies
    i and j over v is '<v>.<i><j>'.

    Attributes:
        tree (WeightedGraph): The base tree
        pairs (Dict[str, Tuple[int, int]]): Valence-2 vertex -> copies joined over it
        middles (Dict[str, int]): Leaf -> copy joined to both other copies
        graph (WeightedGraph): G_T
        morphism (IndexedMorphism): φ_T, contracting exactly the vertical edges
    """

    tree: WeightedGraph
    pairs: Dict[VertexId, Tuple[int, int]]
    middles: Dict[VertexId, int]
    graph: WeightedGraph
    morphism: IndexedMorphism

    def to_dict(self) -> Dict[str, Any]:
        """Converts the ladder to dictionary format"""
        return {
            "tree": self.tree.to_dict(),
            "pairs": {v: list(p) for v, p in sorted(self.pairs.items())},
            "middles": dict(sorted(self.middles.items())),
            "morphism": self.morphism.to_dict(),
        }


def enumerate_trees(n: int, max_valence: int = 3) -> List[WeightedGraph]:
    """
    Trees on n vertices up to isomorphism with every valence at most max_valence.

    Raises:
        ModuliError: If n < 2
    """
    if n < 2:
        raise ModuliError(f"trees need at least 2 vertices, got {n}")
    trees = []
    for t in nx.nonisomorphic_trees(n):
        if max(d for _, d in t.degree()) > max_valence:
            continue
        trees.append(WeightedGraph.from_edge_list(sorted(t.edges())))
    logger.debug(f"{len(trees)} trees on {n} vertices with valence <= {max_valence}")
    return trees


def _assemble_ladder(
    tree: WeightedGraph, pairs: Dict[VertexId, Tuple[int, int]], middles: Dict[VertexId, int]
) -> ThreeLadder:
    vertices = {f"{v}.{i}": 0 for v in tree.vertices for i in COPIES}
    vmap = {f"{v}.{i}": v for v in tree.vertices for i in COPIES}
    edges: Dict[EdgeId, Tuple[VertexId, VertexId]] = {}
    emap: Dict[EdgeId, EdgeId] = {}
    idx: Dict[EdgeId, int] = {}
    for e, (a, b) in tree.edges.items():
        for i in COPIES:
            edges[f"{e}.{i}"] = (f"{a}.{i}", f"{b}.{i}")
            emap[f"{e}.{i}"], idx[f"{e}.{i}"] = e, 1
    vertical = [(v, i, j) for v, (i, j) in pairs.items()]
    vertical += [(v, mid, i) for v, mid in middles.items() for i in COPIES if i != mid]
    for v, i, j in vertical:
        edges[f"{v}.{i}{j}"] = (f"{v}.{i}", f"{v}.{j}")
        idx[f"{v}.{i}{j}"] = 0
    graph = WeightedGraph(vertices=vertices, edges=edges)
    morphism = IndexedMorphism(
        source=graph, target=tree, vertex_map=vmap, edge_map=emap, indices=idx
    )
    return ThreeLadder(tree=tree, pairs=pairs, middles=middles, graph=graph, morphism=morphism)


def ladder_choices(
    tree: WeightedGraph,
) -> Iterable[Tuple[Dict[VertexId, Tuple[int, int]], Dict[VertexId, int]]]:
    """Every admissible assignment of vertical edges, path constraint included."""
    val2 = sorted(v for v in tree.vertices if valence(tree, v) == 2)
    leaves = sorted(v for v in tree.vertices if valence(tree, v) == 1)
    is_path = all(valence(tree, v) <= 2 for v in tree.vertices)
    for chosen in product(PAIRS, repeat=len(val2)):
        if is_path and len(val2) >= 2 and len(set(chosen)) == 1:
            continue
        for mids in product(COPIES, repeat=len(leaves)):
            yield dict(zip(val2, chosen)), dict(zip(leaves, mids))


def build_3_ladders(t: WeightedGraph) -> List[ThreeLadder]:
    """
    All 3-ladders over a tree, up to isomorphism of their trigonal types.

    Args:
        t: A tree with at least 2 vertices and valences at most 3

    Returns:
        List[ThreeLadder]: One ladder per stabilized graph with fibre partition

    Raises:
        ModuliError: If t is not such a tree or a ladder fails its checks
    """
    if len(t.vertices) < 2 or len(t.edges) != len(t.vertices) - 1:
        raise ModuliError("ladders need a tree with at least 2 vertices")
    worst = max(valence(t, v) for v in t.vertices)
    if worst > 3:
        raise ModuliError(f"tree has a vertex of valence {worst}")

    candidates = []
    for pairs, middles in ladder_choices(t):
        ladder = _assemble_ladder(t, pairs, middles)
        report = check_morphism(ladder.morphism)
        if not report.ok or report.degree != 3:
            raise ModuliError(f"ladder cover is not harmonic of degree 3: {report.violations}")
        candidates.append(ladder)
    ladders = _dedup(candidates, lambda ladder: cone_signature(ladder_type(ladder)))
    logger.debug(f"{len(ladders)} ladders from {len(candidates)} choices over {t}")
    return ladders


def ladder_type(ladder: ThreeLadder) -> TrigonalType:
    """The trigonal type of a ladder's stabilization, with G_T as G_φ."""
    return TrigonalType.of(ladder.morphism)


def admissible_modification(
    ladder: ThreeLadder,
    tree_lengths: Optional[Mapping[EdgeId, Rational]] = None,
    vertical_lengths: Optional[Mapping[EdgeId, Rational]] = None,
) -> TrigonalType:
    """
    Metrises a ladder and folds away its contracted edges.

    Args:
        ladder: The ladder
        tree_lengths: Tree edge lengths, 1 where missing
        vertical_lengths: Lengths of vertical edges, 1 where missing

    Returns:
        TrigonalType: Type whose morphism has no contracted edges
    """
    tree_lengths = tree_lengths or {}
    vertical_lengths = vertical_lengths or {}
    phi = ladder.morphism
    target_lengths = {e: as_fraction(tree_lengths.get(e, 1)) for e in phi.target.edges}
    source_lengths = {
        e: target_lengths[phi.edge_map[e]]
        if e in phi.edge_map
        else as_fraction(vertical_lengths.get(e, 1))
        for e in phi.source.edges
    }
    metric = IndexedMorphism(
        source=phi.source,
        target=phi.target,
        vertex_map=phi.vertex_map,
        edge_map=phi.edge_map,
        indices=phi.indices,
        source_lengths=source_lengths,
        target_lengths=target_lengths,
    )
    return TrigonalType.of(remove_contractions(metric))


def certify_admissible(tt: TrigonalType) -> bool:
    """
    True iff the cover of tt is a contraction-free harmonic degree-3 morphism
    satisfying the local Riemann–Hurwitz equation at every vertex.

    Fold midpoints, where two halves of a former vertical edge meet, are
    ramification points and balance with defect 2(m − 1).
    """
    phi = tt.morphism
    try:
        report = check_morphism(phi)
    except MorphismError as e:
        logger.debug(f"Not certified: {str(e)}")
        return False
    if not report.ok or report.degree != 3:
        logger.debug(f"Not certified: {report.violations}")
        return False
    if phi.contracted_edges():
        logger.debug(f"Not certified: contracted edges {phi.contracted_edges()}")
        return False
    for v in sorted(phi.source.vertices):
        _, defect = riemann_hurwitz_local(phi, v)
        expected = 2 * (multiplicity(phi, v) - 1) if v in phi.folds else 0
        if defect != expected:
            logger.debug(f"Not certified: Riemann–Hurwitz defect {defect} at {v}")
            return False
    return True


# ============= Maximal cells =============


@dataclass(frozen=True)
class MaximalCell:
    """
    A maximal cell: a stable graph with the ladder types that realise it.

    Attributes:
        graph (WeightedGraph): The stable graph G
        types (Tuple[TrigonalType, ...]): Ladder types with pairwise different cones
        ladders (Tuple[ThreeLadder, ...]): Every ladder stabilizing to G
        dimension (int): Largest cone dimension among `types`
    """

    graph: WeightedGraph
    types: Tuple[TrigonalType, ...]
    ladders: Tuple[ThreeLadder, ...]
    dimension: int

    @property
    def trigonal_type(self) -> TrigonalType:
        return self.types[0]


@dataclass
class AdjacencyReport:
    """
    Facets of maximal cells and the codimension-1 adjacency between cells.

    Attributes:
        facets (Dict[int, List[TrigonalType]]): Cell index -> its facet types
        graph (nx.Graph): Cells as nodes, an edge wherever two cells share a facet
        connected (bool): Whether `graph` is connected
    """

    facets: Dict[int, List[TrigonalType]]
    graph: nx.Graph
    connected: bool


@dataclass
class ModuliSummary:
    """
    What moduli_summary reports for one genus.

    Attributes:
        genus (int): The genus
        cells (int): Number of maximal cells
        dimensions (List[int]): Cone dimension of each cell
        facets (List[int]): Number of facets of each cell
        connected (bool): Whether the cells are connected through shared facets
        ladders (int): 3-ladders stabilizing to some cell
        expected_dimension (int): Dimension every maximal cell should have
        notes (List[str]): Deviations worth a look
    """

    genus: int
    cells: int
    dimensions: List[int]
    facets: List[int]
    connected: bool
    ladders: int = 0
    expected_dimension: int = 0
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Converts the summary to dictionary format"""
        return {
            "genus": self.genus,
            "cells": self.cells,
            "dimensions": list(self.dimensions),
            "facets": list(self.facets),
            "connected": self.connected,
            "ladders": self.ladders,
            "expected_dimension": self.expected_dimension,
            "notes": list(self.notes),
        }


def expected_dimension(g: int) -> int:
    return 6 if g == 3 else 2 * g + 1


def _map_trees(trees: List[WeightedGraph], jobs: int) -> List[List[ThreeLadder]]:
    if jobs <= 1 or len(trees) <= 1:
        return [build_3_ladders(t) for t in trees]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(build_3_ladders, trees))


def maximal_cells(g: int, jobs: Optional[int] = None) -> List[MaximalCell]:
    """
    Maximal cells of genus g: stabilizations of 3-ladders over trees with g vertices.

    Args:
        g: The genus, at least 3 and at most the configured maximum
        jobs: Worker processes for the per-tree ladder generation

    Returns:
        List[MaximalCell]: One cell per stable graph up to isomorphism

    Raises:
        ModuliError: If g is out of range
    """
    if g < 3:
        raise ModuliError(f"maximal cells need genus >= 3, got {g}")
    if g > config.max_genus():
        raise ModuliError(f"genus {g} is above the configured maximum {config.max_genus()}")
    jobs = jobs if jobs is not None else config.default_jobs()

    trees = enumerate_trees(g)
    per_tree = _map_trees(trees, jobs)
    buckets: Dict[str, List[Dict[str, Any]]] = {}
    groups: List[Dict[str, Any]] = []
    for ladder in (ladder for ladders in per_tree for ladder in ladders):
        tt = ladder_type(ladder)
        bucket = buckets.setdefault(graph_hash(tt.stable), [])
        for group in bucket:
            if are_isomorphic(group["graph"], tt.stable):
                group["ladders"].append(ladder)
                group["types"].append(tt)
                break
        else:
            group = {"graph": tt.stable, "ladders": [ladder], "types": [tt]}
            bucket.append(group)
            groups.append(group)

    cells = []
    for group in groups:
        types = _dedup(group["types"], cone_signature)
        dimension = max(cone_descriptor(tt).dimension for tt in types)
        if dimension != expected_dimension(g):
            logger.warning(f"Cell of dimension {dimension}, expected {expected_dimension(g)}")
        cells.append(
            MaximalCell(
                graph=group["graph"],
                types=tuple(types),
                ladders=tuple(group["ladders"]),
                dimension=dimension,
            )
        )
    logger.info(f"Genus {g}: {len(cells)} maximal cells from {len(trees)} trees")
    return cells


def facets(tt: TrigonalType) -> List[TrigonalType]:
    """Single-class φ-contractions of tt whose cone has one dimension less."""
    dimension = cone_descriptor(tt).dimension
    found = []
    for members in edge_relation(tt).classes:
        try:
            contracted = phi_contract(tt, members)
        except ModuliError as e:
            logger.debug(f"Skipping contraction of {sorted(members)}: {str(e)}")
            continue
        if cone_descriptor(contracted).dimension == dimension - 1:
            found.append(contracted)
    return _dedup(found, cone_signature)


def facets_and_adjacency(cells: List[MaximalCell]) -> AdjacencyReport:
    """
    Facets of every cell and the graph of cells sharing a facet.

    Two cells are adjacent when facets of theirs have isomorphic cone signatures.
    """
    per_cell: Dict[int, List[TrigonalType]] = {}
    buckets: Dict[str, List[Tuple[int, nx.Graph]]] = {}
    graph = nx.Graph()
    for i, cell in enumerate(cells):
        graph.add_node(i)
        per_cell[i] = _dedup((f for tt in cell.types for f in facets(tt)), cone_signature)
        for facet in per_cell[i]:
            sig = cone_signature(facet)
            bucket = buckets.setdefault(signature_hash(sig), [])
            for j, other in bucket:
                if j != i and not graph.has_edge(i, j) and same_signature(sig, other):
                    graph.add_edge(i, j)
            bucket.append((i, sig))
    connected = len(cells) <= 1 or nx.is_connected(graph)
    logger.info(
        f"{len(cells)} cells, {graph.number_of_edges()} adjacencies, connected: {connected}"
    )
    return AdjacencyReport(facets=per_cell, graph=graph, connected=connected)


def moduli_summary(g: int, jobs: Optional[int] = None) -> ModuliSummary:
    """Cells, their dimensions, facet counts and codimension-1 connectivity in genus g."""
    cells = maximal_cells(g, jobs)
    adjacency = facets_and_adjacency(cells)
    notes = []
    dims = [cell.dimension for cell in cells]
    if any(d != expected_dimension(g) for d in dims):
        notes.append(f"cells of dimension other than {expected_dimension(g)}")
    return ModuliSummary(
        genus=g,
        cells=len(cells),
        dimensions=dims,
        facets=[len(adjacency.facets[i]) for i in range(len(cells))],
        connected=adjacency.connected,
        ladders=sum(len(cell.ladders) for cell in cells),
        expected_dimension=expected_dimension(g),
        notes=notes,
    )
