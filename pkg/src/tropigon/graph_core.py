"""
Graph Core - Weighted Multigraphs

Combinatorial layer of tropigon: finite connected multigraphs with loops and
non-negative vertex weights.

Features:
- genus, valence and incidence with loops counted the tropical way
- weighted edge contraction and stabilization (with chain bookkeeping)
- loopless models
- edge connectivity by max-flow and minimal 3-edge cut enumeration
- weight-, loop- and multiplicity-respecting isomorphism (networkx VF2)
"""

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
from loguru import logger

from .errors import GraphError

VertexId = str
EdgeId = str
Ends = Tuple[VertexId, VertexId]
# (edge id, reversed) pieces read from the first end of a chain to its second end
Chain = Tuple[Tuple[EdgeId, bool], ...]


@dataclass(frozen=True)
class WeightedGraph:
    """
    A connected multigraph with loops, parallel edges and vertex weights.

    Every edge stores an ordered pair of ends. The first end is the edge's
    designated origin; offsets of points on metric graphs are measured from it.

    Attributes:
        vertices (Dict[str, int]): Vertex id -> non-negative weight
        edges (Dict[str, Tuple[str, str]]): Edge id -> (first end, second end)
    """

    vertices: Dict[VertexId, int] = field(default_factory=dict)
    edges: Dict[EdgeId, Ends] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.vertices:
            raise GraphError("a graph needs at least one vertex")
        for v, w in self.vertices.items():
            if not isinstance(w, int) or w < 0:
                raise GraphError(f"vertex {v} has invalid weight {w!r}")
        for e, (a, b) in self.edges.items():
            if a not in self.vertices or b not in self.vertices:
                raise GraphError(f"edge {e} has an unknown end ({a}, {b})")
        if not nx.is_connected(self._simple_skeleton()):
            raise GraphError("graph is not connected")

    def _simple_skeleton(self) -> nx.Graph:
        skeleton = nx.Graph()
        skeleton.add_nodes_from(self.vertices)
        skeleton.add_edges_from(self.edges.values())
        return skeleton

    def __str__(self) -> str:
        return f"WeightedGraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, g={genus(self)})"

    # ============= Accessors =============

    def ends(self, e: EdgeId) -> Ends:
        try:
            return self.edges[e]
        except KeyError:
            raise GraphError(f"unknown edge {e}") from None

    def weight(self, v: VertexId) -> int:
        try:
            return self.vertices[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v}") from None

    def is_loop(self, e: EdgeId) -> bool:
        a, b = self.ends(e)
        return a == b

    def loops(self) -> List[EdgeId]:
        return [e for e in sorted(self.edges) if self.is_loop(e)]

    def incident_edges(self, v: VertexId) -> List[EdgeId]:
        """Edges with an end at v, each loop listed once, in id order."""
        self.weight(v)
        return [e for e in sorted(self.edges) if v in self.edges[e]]

    def other_end(self, e: EdgeId, v: VertexId) -> VertexId:
        a, b = self.ends(e)
        if v == a:
            return b
        if v == b:
            return a
        raise GraphError(f"vertex {v} is not an end of edge {e}")

    # ============= Conversion =============

    def to_dict(self) -> Dict[str, Any]:
        """Converts the graph to dictionary format"""
        return {
            "vertices": [{"id": v, "weight": self.vertices[v]} for v in sorted(self.vertices)],
            "edges": [{"id": e, "ends": list(self.edges[e])} for e in sorted(self.edges)],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WeightedGraph":
        """Creates a graph from a dictionary"""
        vertices = {str(item["id"]): int(item.get("weight", 0)) for item in data["vertices"]}
        edges = {
            str(item["id"]): (str(item["ends"][0]), str(item["ends"][1])) for item in data["edges"]
        }
        return cls(vertices=vertices, edges=edges)

    @classmethod
    def from_edge_list(
        cls,
        pairs: Iterable[Tuple[Any, Any]],
        weights: Optional[Dict[Any, int]] = None,
        prefix: str = "e",
    ) -> "WeightedGraph":
        """
        Builds a graph from endpoint pairs, naming edges e0, e1, ... in order.

        Args:
            pairs: Endpoint pairs; repeated pairs give parallel edges, equal ends give loops
            weights: Optional vertex weights, missing vertices get weight 0
            prefix: Prefix of the generated edge ids

        Returns:
            WeightedGraph: The assembled graph
        """
        edges: Dict[EdgeId, Ends] = {}
        vertices: Dict[VertexId, int] = {}
        for i, (a, b) in enumerate(pairs):
            edges[f"{prefix}{i}"] = (str(a), str(b))
            vertices.setdefault(str(a), 0)
            vertices.setdefault(str(b), 0)
        for v, w in (weights or {}).items():
            vertices[str(v)] = w
        return cls(vertices=vertices, edges=edges)


@dataclass(frozen=True)
class EdgeCut:
    """
    A minimal disconnecting edge set.

    Attributes:
        edges (FrozenSet[str]): The cut edges
        sides (Tuple[FrozenSet[str], FrozenSet[str]]): Vertex sets of the two components
    """

    edges: FrozenSet[EdgeId]
    sides: Tuple[FrozenSet[VertexId], FrozenSet[VertexId]]

    def __str__(self) -> str:
        return f"EdgeCut({', '.join(sorted(self.edges))})"


@dataclass(frozen=True)
class Stabilization:
    """
    Result of stabilize_with_chains.

    Attributes:
        graph (WeightedGraph): The stable graph
        chains (Dict[str, Chain]): Stable edge -> ordered source edges it is made of
        contracted (FrozenSet[str]): Source edges contracted away as parts of trees
    """

    graph: WeightedGraph
    chains: Dict[EdgeId, Chain]
    contracted: FrozenSet[EdgeId]


# ============= Invariants =============


def genus(g: WeightedGraph) -> int:
    """Returns Σw(v) + |E| − |V| + 1."""
    return sum(g.vertices.values()) + len(g.edges) - len(g.vertices) + 1


def first_betti_number(g: WeightedGraph) -> int:
    return len(g.edges) - len(g.vertices) + 1


def valence(g: WeightedGraph, v: VertexId) -> int:
    """Number of edge-ends at v; a loop contributes two."""
    g.weight(v)
    return sum((a == v) + (b == v) for a, b in g.edges.values())


def is_stable(g: WeightedGraph) -> bool:
    return all(w > 0 or valence(g, v) >= 3 for v, w in g.vertices.items())


# ============= Contraction and models =============


def contract_edges_with_map(
    g: WeightedGraph, s: Iterable[EdgeId]
) -> Tuple[WeightedGraph, Dict[VertexId, VertexId]]:
    """
    Weighted contraction of an edge set.

    Each merged vertex class is named by its smallest vertex id. Its weight is
    the sum of the merged weights plus the first Betti number of the contracted
    subgraph, so the genus is preserved.

    Args:
        g: The graph
        s: Edges to contract

    Returns:
        Tuple[WeightedGraph, Dict[str, str]]: Contracted graph and old vertex -> new vertex

    Raises:
        GraphError: If an edge id is unknown
    """
    to_contract = set(s)
    for e in to_contract:
        g.ends(e)

    uf = nx.utils.UnionFind(g.vertices)
    for e in to_contract:
        uf.union(*g.edges[e])

    groups: Dict[VertexId, List[VertexId]] = defaultdict(list)
    for v in g.vertices:
        groups[uf[v]].append(v)
    rename = {}
    for members in groups.values():
        name = min(members)
        for v in members:
            rename[v] = name

    weights: Dict[VertexId, int] = defaultdict(int)
    for v, w in g.vertices.items():
        weights[rename[v]] += w
    # each contracted edge beyond a spanning forest closes a cycle
    for members in groups.values():
        inner = [e for e in to_contract if rename[g.edges[e][0]] == rename[members[0]]]
        weights[rename[members[0]]] += len(inner) - (len(members) - 1)

    edges = {
        e: (rename[a], rename[b]) for e, (a, b) in g.edges.items() if e not in to_contract
    }
    return WeightedGraph(vertices=dict(weights), edges=edges), rename


def contract_edges(g: WeightedGraph, s: Iterable[EdgeId]) -> WeightedGraph:
    return contract_edges_with_map(g, s)[0]


def reverse_chain(chain: Chain) -> Chain:
    return tuple((e, not rev) for e, rev in reversed(chain))


def stabilize_with_chains(g: WeightedGraph) -> Stabilization:
    """
    Contracts weight-0 leaves and smooths weight-0 valence-2 vertices until none remain.

    A smoothed vertex merges its two edges into one, which keeps the id of the
    smaller edge and remembers the ordered pieces it is built from.

    Args:
        g: The graph

    Returns:
        Stabilization: The stable graph together with its chain bookkeeping
    """
    vertices = dict(g.vertices)
    edges: Dict[EdgeId, Ends] = dict(g.edges)
    chains: Dict[EdgeId, Chain] = {e: ((e, False),) for e in edges}
    contracted: Set[EdgeId] = set()

    def incident(v: VertexId) -> List[EdgeId]:
        return [e for e in sorted(edges) if v in edges[e]]

    changed = True
    while changed and len(vertices) > 1:
        changed = False
        for v in sorted(vertices):
            if vertices[v] != 0:
                continue
            inc = incident(v)
            ends_at_v = sum((a == v) + (b == v) for a, b in (edges[e] for e in inc))
            if ends_at_v == 1:
                e = inc[0]
                contracted.update(piece for piece, _ in chains.pop(e))
                del edges[e]
                del vertices[v]
                changed = True
                break
            if ends_at_v == 2 and len(inc) == 2:
                e1, e2 = inc
                c1 = chains[e1] if edges[e1][1] == v else reverse_chain(chains[e1])
                a = edges[e1][0] if edges[e1][1] == v else edges[e1][1]
                c2 = chains[e2] if edges[e2][0] == v else reverse_chain(chains[e2])
                b = edges[e2][1] if edges[e2][0] == v else edges[e2][0]
                edges[e1] = (a, b)
                chains[e1] = c1 + c2
                del edges[e2], chains[e2], vertices[v]
                changed = True
                break

    stable = WeightedGraph(vertices=vertices, edges=edges)
    logger.debug(f"Stabilized {g} to {stable}, {len(contracted)} edges contracted")
    return Stabilization(graph=stable, chains=chains, contracted=frozenset(contracted))


def stable_model(g: WeightedGraph) -> WeightedGraph:
    """
    Returns the stable model of a graph of genus at least 2.

    Raises:
        GraphError: If the genus is smaller than 2
    """
    if genus(g) < 2:
        raise GraphError(f"stable model needs genus >= 2, got {genus(g)}")
    return stabilize_with_chains(g).graph


def loopless_model(g: WeightedGraph) -> WeightedGraph:
    """Replaces every loop e at v by two edges through a new weight-0 vertex '<e>.mid'."""
    vertices = dict(g.vertices)
    edges: Dict[EdgeId, Ends] = {}
    for e, (a, b) in g.edges.items():
        if a != b:
            edges[e] = (a, b)
            continue
        mid = f"{e}.mid"
        if mid in vertices:
            raise GraphError(f"vertex id {mid} already in use")
        vertices[mid] = 0
        edges[f"{e}.a"] = (a, mid)
        edges[f"{e}.b"] = (mid, a)
    return WeightedGraph(vertices=vertices, edges=edges)


# ============= Connectivity =============


def to_networkx(g: WeightedGraph) -> nx.MultiGraph:
    """MultiGraph copy with a `weight` node attribute and edge keys equal to edge ids."""
    h = nx.MultiGraph()
    for v in sorted(g.vertices):
        h.add_node(v, weight=g.vertices[v])
    for e in sorted(g.edges):
        a, b = g.edges[e]
        h.add_edge(a, b, key=e)
    return h


def is_connected_without(g: WeightedGraph, removed: Iterable[EdgeId]) -> bool:
    dropped = set(removed)
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(ends for e, ends in g.edges.items() if e not in dropped)
    return nx.is_connected(h)


def edge_connectivity(g: WeightedGraph) -> int:
    """
    Minimum number of edges whose removal disconnects the graph.

    Computed as the minimum max-flow between a fixed vertex and every other
    vertex, with parallel edges adding capacity. Loops never matter.

    Raises:
        GraphError: For a single-vertex graph, which no edge set disconnects
    """
    if len(g.vertices) == 1:
        raise GraphError("edge connectivity is undefined for a single vertex")
    flow_graph = nx.DiGraph()
    flow_graph.add_nodes_from(g.vertices)
    for a, b in g.edges.values():
        if a == b:
            continue
        for x, y in ((a, b), (b, a)):
            if flow_graph.has_edge(x, y):
                flow_graph[x][y]["capacity"] += 1
            else:
                flow_graph.add_edge(x, y, capacity=1)
    source, *others = sorted(g.vertices)
    return min(int(nx.maximum_flow_value(flow_graph, source, t)) for t in others)


def is_k_edge_connected(g: WeightedGraph, k: int) -> bool:
    if len(g.vertices) == 1:
        return True
    return edge_connectivity(g) >= k


def components_without(g: WeightedGraph, removed: Set[EdgeId]) -> List[Set[VertexId]]:
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(ends for e, ends in g.edges.items() if e not in removed)
    return [set(c) for c in nx.connected_components(h)]


def enumerate_3_edge_cuts(g: WeightedGraph) -> List[EdgeCut]:
    """Lists every minimal disconnecting set of exactly three edges, sorted by edge ids."""
    if len(g.vertices) == 1 or edge_connectivity(g) > 3:
        return []
    candidates = sorted(e for e in g.edges if not g.is_loop(e))
    small_cuts: Set[FrozenSet[EdgeId]] = set()
    for size in (1, 2):
        for combo in combinations(candidates, size):
            if not is_connected_without(g, combo):
                small_cuts.add(frozenset(combo))

    cuts = []
    for triple in combinations(candidates, 3):
        if any(frozenset(sub) in small_cuts for n in (1, 2) for sub in combinations(triple, n)):
            continue
        components = components_without(g, set(triple))
        if len(components) != 2:
            continue
        first, second = sorted((frozenset(c) for c in components), key=min)
        cuts.append(EdgeCut(edges=frozenset(triple), sides=(first, second)))
    return cuts


# ============= Isomorphism =============


def _same_edge_multiplicity(a: Dict[Any, Any], b: Dict[Any, Any]) -> bool:
    return len(a) == len(b)


def are_isomorphic(g1: WeightedGraph, g2: WeightedGraph) -> bool:
    """True iff an isomorphism of weighted multigraphs exists (VF2 on MultiGraphs)."""
    if (len(g1.vertices), len(g1.edges), genus(g1)) != (len(g2.vertices), len(g2.edges), genus(g2)):
        return False
    if sorted(g1.vertices.values()) != sorted(g2.vertices.values()):
        return False
    return bool(
        nx.is_isomorphic(
            to_networkx(g1),
            to_networkx(g2),
            node_match=lambda x, y: x["weight"] == y["weight"],
            edge_match=_same_edge_multiplicity,
        )
    )


def graph_hash(g: WeightedGraph) -> str:
    """Isomorphism-invariant Weisfeiler–Lehman hash, used to bucket before VF2."""
    simple = nx.Graph()
    for v, w in g.vertices.items():
        loops = sum(1 for a, b in g.edges.values() if a == b == v)
        simple.add_node(v, label=f"{w}:{loops}")
    for a, b in g.edges.values():
        if a == b:
            continue
        if simple.has_edge(a, b):
            simple[a][b]["label"] = str(int(simple[a][b]["label"]) + 1)
        else:
            simple.add_edge(a, b, label="1")
    return str(nx.weisfeiler_lehman_graph_hash(simple, node_attr="label", edge_attr="label"))


def relabel(g: WeightedGraph, mapping: Dict[VertexId, VertexId]) -> WeightedGraph:
    """Renames vertices; ids missing from the mapping are kept."""
    rename = {v: mapping.get(v, v) for v in g.vertices}
    if len(set(rename.values())) != len(rename):
        raise GraphError("relabelling is not injective")
    return WeightedGraph(
        vertices={rename[v]: w for v, w in g.vertices.items()},
        edges={e: (rename[a], rename[b]) for e, (a, b) in g.edges.items()},
    )


def degree_sequence(g: WeightedGraph) -> Sequence[int]:
    return sorted((valence(g, v) for v in g.vertices), reverse=True)
