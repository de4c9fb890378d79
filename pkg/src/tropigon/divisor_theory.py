"""
Divisor Theory on Metric Graphs

Chip configurations on metric graphs and the Baker–Norine rank.

Features:
- Divisor and RationalFn values with exact rational positions
- Dhar's burning algorithm and base-reduced divisors
- linear equivalence through reduced representatives
- rank via recursion over a rank-determining set
- smoothing of chips sharing a canonical edge
- divisorial gonality witnesses and a heuristic trigonal divisor search
"""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

from loguru import logger

from . import config
from .errors import DivisorError
from .metric_graph import (
    MetricGraph,
    Point,
    RefinementMap,
    Rational,
    as_fraction,
    canonical_loopless_model,
    canonical_model,
    format_fraction,
    identity_map,
    parse_point,
    refine_at,
)
from .graph_core import EdgeId, VertexId, WeightedGraph


class Divisor:
    """
    A finite integer combination of points.

    Coefficients equal to zero are dropped, so two divisors are equal exactly
    when they have the same chips. Points are expected in normalized form
    (see normalize_divisor).
    """

    def __init__(self, chips: Optional[Mapping[Point, int]] = None) -> None:
        self._chips: Dict[Point, int] = {}
        for p, c in (chips or {}).items():
            if c:
                self._chips[p] = self._chips.get(p, 0) + int(c)
        self._chips = {p: c for p, c in self._chips.items() if c}

    @classmethod
    def of(cls, points: Iterable[Point]) -> "Divisor":
        """Sum of the given points, repeated points adding up."""
        chips: Dict[Point, int] = defaultdict(int)
        for p in points:
            chips[p] += 1
        return cls(chips)

    def __getitem__(self, p: Point) -> int:
        return self._chips.get(p, 0)

    def items(self) -> List[Tuple[Point, int]]:
        return sorted(self._chips.items(), key=lambda item: item[0].sort_key())

    @property
    def support(self) -> List[Point]:
        return [p for p, _ in self.items()]

    @property
    def degree(self) -> int:
        return sum(self._chips.values())

    def is_effective(self) -> bool:
        return all(c > 0 for c in self._chips.values())

    def negative_part(self) -> "Divisor":
        return Divisor({p: -c for p, c in self._chips.items() if c < 0})

    def positive_part(self) -> "Divisor":
        return Divisor({p: c for p, c in self._chips.items() if c > 0})

    def __add__(self, other: "Divisor") -> "Divisor":
        chips = dict(self._chips)
        for p, c in other._chips.items():
            chips[p] = chips.get(p, 0) + c
        return Divisor(chips)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -c for p, c in self._chips.items()})

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor({p: k * c for p, c in self._chips.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Divisor) and self._chips == other._chips

    def __hash__(self) -> int:
        return hash(frozenset(self._chips.items()))

    def __len__(self) -> int:
        return len(self._chips)

    def __str__(self) -> str:
        if not self._chips:
            return "0"
        return " + ".join(f"{c}*{p}" if c != 1 else str(p) for p, c in self.items())

    __repr__ = __str__

    def to_dict(self) -> Dict[str, Any]:
        """Converts the divisor to dictionary format"""
        return {"chips": [{"point": str(p), "coefficient": c} for p, c in self.items()]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Divisor":
        """Creates a divisor from a dictionary"""
        return cls({parse_point(item["point"]): int(item["coefficient"]) for item in data["chips"]})


def point_divisor(p: Point, k: int = 1) -> Divisor:
    return Divisor({p: k})


def normalize_divisor(m: MetricGraph, d: Divisor) -> Divisor:
    """Validates every support point on m and rewrites it in normalized form."""
    return Divisor({m.normalize(p): c for p, c in d.items()})


def push_divisor(rmap: RefinementMap, d: Divisor) -> Divisor:
    """Moves a divisor from the fine model of a refinement map to its coarse model."""
    chips: Dict[Point, int] = defaultdict(int)
    for p, c in d.items():
        q = rmap.to_coarse(p)
        if q is None:
            raise DivisorError(f"point {p} lies on a tree dropped by the coarse model")
        chips[q] += c
    return Divisor(chips)


def pull_divisor(rmap: RefinementMap, d: Divisor) -> Divisor:
    """Moves a divisor from the coarse model of a refinement map to its fine model."""
    return Divisor({rmap.to_fine(p): c for p, c in d.items()})


# ============= Rational functions =============


@dataclass(frozen=True)
class RationalFn:
    """
    A continuous piecewise affine function with integer slopes.

    The function is affine on every edge of `model`, a refinement of the
    ambient metric graph, and is given by its values at the model's vertices.

    Attributes:
        refinement (RefinementMap): Map from the model onto the ambient graph
        values (Dict[str, Fraction]): Model vertex -> value
    """

    refinement: RefinementMap
    values: Dict[VertexId, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        model = self.refinement.fine
        values = {v: as_fraction(x) for v, x in self.values.items()}
        if set(values) != set(model.vertices):
            raise DivisorError("a rational function needs a value at every model vertex")
        object.__setattr__(self, "values", values)
        for e in model.edges:
            if self.slope(e).denominator != 1:
                raise DivisorError(f"non-integer slope {self.slope(e)} on edge {e}")

    @property
    def model(self) -> MetricGraph:
        return self.refinement.fine

    @property
    def ambient(self) -> MetricGraph:
        return self.refinement.coarse

    def slope(self, e: EdgeId) -> Fraction:
        """Slope along e read from its first end to its second end."""
        a, b = self.model.edges[e]
        return (self.values[b] - self.values[a]) / self.model.length(e)

    def to_dict(self) -> Dict[str, Any]:
        """Converts the function to dictionary format"""
        return {
            "breakpoints": [
                {
                    "point": str(self.refinement.to_coarse(Point(vertex=v))),
                    "value": format_fraction(self.values[v]),
                }
                for v in sorted(self.values)
            ]
        }


def rational_fn(m: MetricGraph, values: Mapping[Point, Rational]) -> RationalFn:
    """
    Builds the rational function interpolating `values` on the refinement at their points.

    Every vertex of m must receive a value, either explicitly or because it is
    listed as a point.

    Raises:
        DivisorError: If a vertex value is missing or a slope is not an integer
    """
    points = {m.normalize(p): as_fraction(x) for p, x in values.items()}
    fine, rmap = refine_at(m, points)
    by_vertex = {}
    for p, x in points.items():
        by_vertex[rmap.to_fine(p).vertex] = x
    return RationalFn(refinement=rmap, values=by_vertex)


def tent_function(
    m: MetricGraph, edge: EdgeId, start: Rational, end: Rational, slope: int = 1
) -> RationalFn:
    """
    The tent on [start, end] of one edge: zero outside, rising with `slope` to the
    midpoint and falling back to zero.
    """
    lo, hi = as_fraction(start), as_fraction(end)
    if not 0 <= lo < hi <= m.length(edge):
        raise DivisorError(f"tent interval [{lo}, {hi}] does not fit on edge {edge}")
    mid = (lo + hi) / 2
    values: Dict[Point, Fraction] = {Point(vertex=v): Fraction(0) for v in m.vertices}
    values[m.point_on(edge, lo)] = Fraction(0)
    values[m.point_on(edge, hi)] = Fraction(0)
    values[m.point_on(edge, mid)] = slope * (mid - lo)
    return rational_fn(m, values)


def divisor_of(f: RationalFn) -> Divisor:
    """
    div(f): at every point, the sum of the outgoing slopes of f.

    Returns:
        Divisor: A degree-0 divisor on the ambient graph
    """
    model = f.model
    chips: Dict[Point, int] = defaultdict(int)
    for e, (a, b) in model.edges.items():
        s = f.slope(e)
        if s.denominator != 1:
            raise DivisorError(f"non-integer slope {s} on edge {e}")
        chips[Point(vertex=a)] += int(s)
        chips[Point(vertex=b)] -= int(s)
    return push_divisor(f.refinement, Divisor(chips))


# ============= Dhar's burning algorithm =============


@dataclass(frozen=True)
class BurnReport:
    """
    Outcome of Dhar's burning algorithm.

    Attributes:
        burnt (FrozenSet[Point]): Burnt model vertices, as points of the ambient graph
        unburnt (FrozenSet[Point]): Unburnt model vertices
        unburnt_segments (Tuple[Tuple[str, Fraction, Fraction], ...]): Ambient edge
            intervals [a, b] that stay unburnt
        blocking (Dict[Point, int]): Boundary points of the unburnt region -> number
            of burning directions they hold off
    """

    burnt: FrozenSet[Point]
    unburnt: FrozenSet[Point]
    unburnt_segments: Tuple[Tuple[EdgeId, Fraction, Fraction], ...]
    blocking: Dict[Point, int]

    @property
    def burns_all(self) -> bool:
        return not self.unburnt


@dataclass
class _Workspace:
    """A divisor spread on the refinement at its support, chips on vertices."""

    fine: MetricGraph
    rmap: RefinementMap
    chips: Dict[VertexId, int]
    adjacency: Dict[VertexId, List[Tuple[EdgeId, VertexId]]]

    @classmethod
    def build(cls, m: MetricGraph, d: Divisor, extra: Iterable[Point] = ()) -> "_Workspace":
        fine, rmap = refine_at(m, list(d.support) + list(extra))
        chips = {}
        for p, c in d.items():
            chips[rmap.to_fine(p).vertex] = c
        adjacency: Dict[VertexId, List[Tuple[EdgeId, VertexId]]] = defaultdict(list)
        for e in sorted(fine.edges):
            a, b = fine.edges[e]
            if a != b:
                adjacency[a].append((e, b))
                adjacency[b].append((e, a))
        return cls(fine=fine, rmap=rmap, chips=chips, adjacency=adjacency)

    def vertex(self, p: Point) -> VertexId:
        v = self.rmap.to_fine(p).vertex
        assert v is not None
        return v

    def burn(self, start: VertexId) -> Tuple[Set[VertexId], Dict[VertexId, int]]:
        """Returns the unburnt vertices and the burning directions reaching each of them."""
        burnt = {start}
        stack = [start]
        directions: Dict[VertexId, int] = defaultdict(int)
        while stack:
            v = stack.pop()
            for _, w in self.adjacency[v]:
                if w in burnt:
                    continue
                directions[w] += 1
                if directions[w] > self.chips.get(w, 0):
                    burnt.add(w)
                    stack.append(w)
        unburnt = set(self.fine.vertices) - burnt
        return unburnt, {v: directions[v] for v in unburnt if directions[v]}

    def to_divisor(self, moved: Iterable[Tuple[Point, int]] = ()) -> Divisor:
        chips: Dict[Point, int] = defaultdict(int)
        for v, c in self.chips.items():
            coarse = self.rmap.to_coarse(Point(vertex=v))
            assert coarse is not None
            chips[coarse] += c
        for p, c in moved:
            coarse = self.rmap.to_coarse(p)
            assert coarse is not None
            chips[coarse] += c
        return Divisor(chips)


def dhar_burn(m: MetricGraph, d: Divisor, start: Point) -> BurnReport:
    """
    Runs Dhar's burning algorithm from `start`.

    A chip-bearing point burns once strictly more incident directions are on
    fire than it holds chips; every other point burns on contact.

    Args:
        m: The metric graph
        d: An effective divisor, except possibly at `start`
        start: Where the fire starts

    Returns:
        BurnReport: Burnt and unburnt parts with the blocking points

    Raises:
        DivisorError: If d is negative away from `start`
    """
    d = normalize_divisor(m, d)
    start = m.normalize(start)
    if any(c < 0 and p != start for p, c in d.items()):
        raise DivisorError("Dhar's algorithm needs a divisor effective away from the start")
    ws = _Workspace.build(m, d, [start])
    unburnt, directions = ws.burn(ws.vertex(start))

    def to_point(v: VertexId) -> Point:
        p = ws.rmap.to_coarse(Point(vertex=v))
        assert p is not None
        return p

    segments = []
    for ce, pieces in sorted(ws.rmap.paths.items()):
        offset = Fraction(0)
        for fe, _ in pieces:
            a, b = ws.fine.edges[fe]
            length = ws.fine.length(fe)
            if a in unburnt and b in unburnt:
                segments.append((ce, offset, offset + length))
            offset += length
    return BurnReport(
        burnt=frozenset(to_point(v) for v in ws.fine.vertices if v not in unburnt),
        unburnt=frozenset(to_point(v) for v in unburnt),
        unburnt_segments=tuple(segments),
        blocking={to_point(v): n for v, n in directions.items()},
    )


# ============= Reduced divisors =============


def _reduce_effective_away(m: MetricGraph, d: Divisor, base: Point) -> Divisor:
    """Base-reduction of a divisor that is effective away from `base`."""
    guard = config.step_guard()
    current = d
    for step in range(guard):
        ws = _Workspace.build(m, current, [base])
        unburnt, _ = ws.burn(ws.vertex(base))
        if not unburnt:
            logger.debug(f"Reduced at {base} after {step} firing steps")
            return current
        boundary = [
            (u, e) for u in sorted(unburnt) for e, w in ws.adjacency[u] if w not in unburnt
        ]
        eps = min(ws.fine.length(e) for _, e in boundary)
        moved = []
        for u, e in boundary:
            ws.chips[u] -= 1
            length = ws.fine.length(e)
            offset = eps if ws.fine.edges[e][0] == u else length - eps
            moved.append((ws.fine.point_on(e, offset), 1))
        current = ws.to_divisor(moved)
    raise DivisorError(f"reduction did not finish within {guard} steps (TROPIGON_STEP_GUARD)")


def to_effective(m: MetricGraph, d: Divisor) -> Optional[Divisor]:
    """
    Returns an effective divisor linearly equivalent to d, or None if there is none.

    Negative points are cleared one at a time: the running effective divisor
    minus the chips owed at p is reduced at p, which settles whether anything
    effective is left.
    """
    d = normalize_divisor(m, d)
    current = d.positive_part()
    for p, c in d.negative_part().items():
        current = _reduce_effective_away(m, current - point_divisor(p, c), p)
        if current[p] < 0:
            return None
    return current


def reduce(m: MetricGraph, d: Divisor, base: Point) -> Divisor:
    """
    The base-reduced divisor linearly equivalent to d.

    Divisors negative away from the base are padded with chips at the base
    until their degree reaches the genus, which by Riemann–Roch makes them
    equivalent to an effective divisor; the padding is removed at the end.

    Raises:
        DivisorError: If the step guard is exceeded
    """
    d = normalize_divisor(m, d)
    base = m.normalize(base)
    if all(c >= 0 or p == base for p, c in d.items()):
        return _reduce_effective_away(m, d, base)
    padding = max(0, m.genus - d.degree)
    effective = to_effective(m, d + point_divisor(base, padding))
    if effective is None:
        raise DivisorError("padding failed to produce an effective representative")
    return _reduce_effective_away(m, effective, base) - point_divisor(base, padding)


def default_base(m: MetricGraph) -> Point:
    return Point(vertex=min(m.vertices))


def linearly_equivalent(m: MetricGraph, d1: Divisor, d2: Divisor) -> bool:
    if d1.degree != d2.degree:
        return False
    base = default_base(m)
    return reduce(m, d1, base) == reduce(m, d2, base)


# ============= Rank =============


def _canonical_points(m: MetricGraph, loopless: bool) -> List[Point]:
    """Vertices of the canonical (loopless) model as points of m, plus tree attachment vertices."""
    if m.genus < 2:
        points = [Point(vertex=v) for v in m.vertices]
        if loopless:
            points += [Point(edge=e, offset=m.length(e) / 2) for e in m.graph.loops()]
        return points
    canonical, cmap = canonical_model(m)
    if loopless:
        model, lmap = canonical_loopless_model(m)
        coarse_points = [lmap.to_coarse(Point(vertex=v)) for v in model.vertices]
    else:
        coarse_points = [Point(vertex=v) for v in canonical.vertices]
    points = {cmap.to_fine(p) for p in coarse_points if p is not None}
    kept = {fe for pieces in cmap.paths.values() for fe, _ in pieces}
    for e, (a, b) in m.edges.items():
        if e not in kept:
            points.update((Point(vertex=a), Point(vertex=b)))
    return sorted(points, key=Point.sort_key)


def rank_determining_set(m: MetricGraph, d: Optional[Divisor] = None) -> List[Point]:
    """Vertices of the canonical loopless model (with any attached trees) plus Supp(d)."""
    points = set(_canonical_points(m, loopless=True))
    if d is not None:
        points.update(normalize_divisor(m, d).support)
    return sorted(points, key=Point.sort_key)


def canonical_vertices(m: MetricGraph) -> List[Point]:
    return _canonical_points(m, loopless=False)


def _rank_at_least_effective(
    m: MetricGraph,
    d: Divisor,
    r: int,
    test_points: List[Point],
    memo: Dict[Tuple[Divisor, int], bool],
) -> bool:
    if r == 0:
        return True
    if d.degree < r:
        return False
    key = (d, r)
    if key in memo:
        return memo[key]
    answer = True
    for v in test_points:
        reduced = _reduce_effective_away(m, d, v)
        if reduced[v] < 1 or not _rank_at_least_effective(
            m, reduced - point_divisor(v), r - 1, test_points, memo
        ):
            answer = False
            break
    memo[key] = answer
    return answer


def rank_at_least(m: MetricGraph, d: Divisor, r: int) -> bool:
    """
    True iff rk(d) >= r.

    For r >= 1 this checks, for every point v of a rank-determining set, that
    the v-reduced form has a chip at v and that removing it leaves rank >= r - 1.
    """
    if r < 0:
        return True
    effective = to_effective(m, d)
    if effective is None:
        return False
    test_points = rank_determining_set(m, effective)
    return _rank_at_least_effective(m, effective, r, test_points, {})


def rank(m: MetricGraph, d: Divisor, use_riemann_roch: bool = True) -> int:
    """
    Baker–Norine rank, −1 when d is not equivalent to an effective divisor.

    Args:
        m: The metric graph
        d: The divisor
        use_riemann_roch: Answer deg − g directly above degree 2g − 2 and cap the
            search by Clifford's bound below it

    Returns:
        int: The rank
    """
    effective = to_effective(m, d)
    if effective is None:
        return -1
    deg, g = effective.degree, m.genus
    cap = deg
    if use_riemann_roch:
        if deg > 2 * g - 2:
            return deg - g
        cap = deg // 2
    test_points = rank_determining_set(m, effective)
    memo: Dict[Tuple[Divisor, int], bool] = {}
    r = 0
    while r < cap and _rank_at_least_effective(m, effective, r + 1, test_points, memo):
        r += 1
    return r


# ============= Representatives =============


def smooth_common_edge(m: MetricGraph, d: Divisor) -> Divisor:
    """
    Moves chips apart until no two support points are interior to one canonical edge.

    On an edge holding several interior points, the points closest to either end
    slide one chip each towards their end by the shorter of the two distances.

    Raises:
        DivisorError: If d is not effective
    """
    d = normalize_divisor(m, d)
    if not d.is_effective():
        raise DivisorError("smoothing needs an effective divisor")
    if m.genus < 2:
        coarse, cmap = m, identity_map(m)
    else:
        coarse, cmap = canonical_model(m)

    chips: Dict[Point, int] = defaultdict(int)
    stranded: Dict[Point, int] = {}
    for p, c in d.items():
        q = cmap.to_coarse(p)
        if q is None:
            stranded[p] = c
        else:
            chips[q] += c

    for _ in range(config.step_guard()):
        crowded = None
        for e in sorted(coarse.edges):
            offsets = sorted(p.offset for p, c in chips.items() if c and p.edge == e)
            if len(offsets) >= 2:
                crowded = (e, offsets[0], offsets[-1])
                break
        if crowded is None:
            break
        e, lo, hi = crowded
        step = min(lo, coarse.length(e) - hi)
        for src, dst in ((lo, lo - step), (hi, hi + step)):
            chips[coarse.point_on(e, src)] -= 1
            chips[coarse.point_on(e, dst)] += 1
    else:
        raise DivisorError("smoothing did not finish within the step guard")

    result = Divisor({cmap.to_fine(q): c for q, c in chips.items() if c})
    return result + Divisor(stranded)


# ============= Gonality =============


def is_divisorially_d_gonal_witness(m: MetricGraph, d: Divisor, k: int) -> bool:
    """
    True iff d is a degree-k divisor of rank at least 1.

    Raises:
        DivisorError: If deg(d) != k
    """
    if d.degree != k:
        raise DivisorError(f"divisor has degree {d.degree}, expected {k}")
    return rank_at_least(m, d, 1)


def _edge_midpoints(m: MetricGraph) -> List[Point]:
    model, lmap = canonical_loopless_model(m)
    _, cmap = canonical_model(m)
    points = []
    for e in sorted(model.edges):
        coarse = lmap.to_coarse(model.point_on(e, model.length(e) / 2))
        if coarse is not None:
            points.append(cmap.to_fine(coarse))
    return points


def _triples(points: List[Point]) -> Iterator[Divisor]:
    for combo in combinations_with_replacement(points, 3):
        yield Divisor.of(combo)


def find_trigonal_divisor(m: MetricGraph) -> Optional[Divisor]:
    """
    Heuristic search for a degree-3 divisor of rank at least 1.

    Tries effective triples on the vertices of the canonical loopless model
    first, then triples involving midpoints of its edges. Returning None does
    not prove that m is not divisorially trigonal.
    """
    if m.genus < 2:
        raise DivisorError("the trigonal search needs genus >= 2")
    vertices = _canonical_points(m, loopless=True)
    for candidate in _triples(vertices):
        if rank_at_least(m, candidate, 1):
            logger.info(f"Found trigonal divisor {candidate} on model vertices")
            return candidate
    midpoints = _edge_midpoints(m)
    seen: Set[Divisor] = set()
    for candidate in _triples(vertices + midpoints):
        if candidate in seen or all(p in vertices for p in candidate.support):
            continue
        seen.add(candidate)
        if rank_at_least(m, candidate, 1):
            logger.info(f"Found trigonal divisor {candidate} using edge midpoints")
            return candidate
    logger.warning("No trigonal divisor found by the heuristic search")
    return None


def hyperelliptic_candidates(m: MetricGraph) -> List[Divisor]:
    """Degree-2 effective divisors on canonical vertices whose rank is at least 1."""
    found = []
    for combo in combinations_with_replacement(canonical_vertices(m), 2):
        candidate = Divisor.of(combo)
        if rank_at_least(m, candidate, 1):
            found.append(candidate)
    return found


def vertex_divisor(graph: WeightedGraph, counts: Mapping[VertexId, int]) -> Divisor:
    """Divisor with the given coefficients on vertices of a model."""
    for v in counts:
        graph.weight(v)
    return Divisor({Point(vertex=v): c for v, c in counts.items()})
