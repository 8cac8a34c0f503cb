"""Line arrangements, vertical decompositions and sampled cuttings"""

from __future__ import annotations

import bisect
import logging

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .common import draw_until_verified, floor_fraction, log_factor
from .geometry import Line, Point, PointSet, segment_line_crossing
from ..errors import CuttingNotFound, InvalidParameter, LineThroughPoint

LOGGER = logging.getLogger(__name__)

# (left_x, right_x, floor, ceiling); None stands for the matching infinity.
CellBounds = Tuple[Optional[Fraction], Optional[Fraction], Optional[Line], Optional[Line]]


def _linear_constraint(line: Line, origin: Point, dx: Fraction, dy: Fraction):
    """Coefficients (alpha, beta) of ``(residual/b)(origin + t*d)`` for a non-vertical line."""
    alpha = line.residual(origin) / line.b
    beta = (line.a * dx + line.b * dy) / line.b
    return alpha, beta


def _open_interval_meets(
    constraints: Iterable[Tuple[Fraction, Fraction]],
    t_lo: Optional[Fraction],
    t_hi: Optional[Fraction],
) -> bool:
    """Does ``{t : alpha + beta*t > 0 for all}`` meet the closed range [t_lo, t_hi]?"""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None

    for alpha, beta in constraints:
        if beta == 0:
            if alpha <= 0:
                return False
            continue

        bound = -alpha / beta
        if beta > 0:
            lo = bound if lo is None else max(lo, bound)
        else:
            hi = bound if hi is None else min(hi, bound)

    if lo is not None and hi is not None and lo >= hi:
        return False

    if t_lo is not None and t_hi is not None and t_lo == t_hi:
        return (lo is None or lo < t_lo) and (hi is None or t_lo < hi)

    left = lo if t_lo is None else (t_lo if lo is None else max(lo, t_lo))
    right = hi if t_hi is None else (t_hi if hi is None else min(hi, t_hi))
    return left is None or right is None or left < right


@dataclass(frozen=True)
class Trapezoid:
    """
    An open cell of a vertical decomposition.

    Attributes
    ----------
    id : int
        Index of the cell in its Trapezoidation.
    left_x, right_x : Fraction or None
        Vertical walls; None means the cell is unbounded on that side.
    floor, ceiling : Line or None
        Non-vertical bounding lines; None means unbounded below/above.
    contained_points : tuple of int
        Indices of the ambient points strictly inside the cell.
    """

    id: int
    left_x: Optional[Fraction]
    right_x: Optional[Fraction]
    floor: Optional[Line]
    ceiling: Optional[Line]
    contained_points: Tuple[int, ...] = ()

    @property
    def bounds(self) -> CellBounds:
        return self.left_x, self.right_x, self.floor, self.ceiling

    def contains(self, p: Point) -> bool:
        """Strict containment in the open cell."""
        if self.left_x is not None and p.x <= self.left_x:
            return False
        if self.right_x is not None and p.x >= self.right_x:
            return False
        if self.floor is not None and p.y <= self.floor.y_at(p.x):
            return False
        if self.ceiling is not None and p.y >= self.ceiling.y_at(p.x):
            return False
        return True

    def span_at(self, x: Fraction) -> Tuple[Optional[Fraction], Optional[Fraction]]:
        lo = None if self.floor is None else self.floor.y_at(x)
        hi = None if self.ceiling is None else self.ceiling.y_at(x)
        return lo, hi

    def corners(self) -> List[Point]:
        points = []
        for x in (self.left_x, self.right_x):
            if x is None:
                continue
            for line in (self.floor, self.ceiling):
                if line is not None:
                    points.append(Point(x, line.y_at(x)))
        return points

    def meets(
        self,
        origin: Point,
        dx: Fraction,
        dy: Fraction,
        t_lo: Optional[Fraction] = None,
        t_hi: Optional[Fraction] = None,
    ) -> bool:
        """Does ``origin + t*(dx, dy)``, t in [t_lo, t_hi], enter the open cell?"""
        constraints = []
        if self.left_x is not None:
            constraints.append((origin.x - self.left_x, dx))
        if self.right_x is not None:
            constraints.append((self.right_x - origin.x, -dx))
        if self.floor is not None:
            constraints.append(_linear_constraint(self.floor, origin, dx, dy))
        if self.ceiling is not None:
            alpha, beta = _linear_constraint(self.ceiling, origin, dx, dy)
            constraints.append((-alpha, -beta))

        return _open_interval_meets(constraints, t_lo, t_hi)

    def crossed_by(self, line: Line) -> bool:
        """True iff the line meets the open cell."""
        origin, dx, dy = _line_parametrization(line)
        return self.meets(origin, dx, dy)


def _line_parametrization(line: Line) -> Tuple[Point, Fraction, Fraction]:
    if line.is_vertical:
        return Point(line.c / line.a, Fraction(0)), Fraction(0), Fraction(1)
    return Point(Fraction(0), line.c / line.b), line.b, -line.a


def _spans_overlap(a: Trapezoid, b: Trapezoid, x: Fraction) -> bool:
    a_lo, a_hi = a.span_at(x)
    b_lo, b_hi = b.span_at(x)

    lo = a_lo if b_lo is None else (b_lo if a_lo is None else max(a_lo, b_lo))
    hi = a_hi if b_hi is None else (b_hi if a_hi is None else min(a_hi, b_hi))
    return lo is None or hi is None or lo < hi


def _ranges_overlap(a: Trapezoid, b: Trapezoid) -> bool:
    lo = a.left_x if b.left_x is None else (b.left_x if a.left_x is None else max(a.left_x, b.left_x))
    hi = a.right_x if b.right_x is None else (b.right_x if a.right_x is None else min(a.right_x, b.right_x))
    return lo is None or hi is None or lo < hi


@dataclass(frozen=True)
class Trapezoidation:
    """
    Vertical decomposition of a line arrangement, with point assignment.

    Attributes
    ----------
    cells : tuple of Trapezoid
        Pairwise disjoint open cells; ``cells[k].id == k``.
    source_lines : tuple of Line
        The (deduplicated) lines of the arrangement.
    vertices : tuple of Point
        Every finite cell corner, sorted.
    point_to_cell : dict
        Ambient point index -> id of the cell containing it.
    adjacency : networkx.Graph
        Cells sharing a wall (``kind="wall"``) or a piece of a line
        (``kind="line"``).
    """

    cells: Tuple[Trapezoid, ...]
    source_lines: Tuple[Line, ...]
    vertices: Tuple[Point, ...]
    point_to_cell: Dict[int, int]
    adjacency: nx.Graph = field(compare=False, repr=False)
    _breaks: Tuple[Fraction, ...] = field(compare=False, repr=False, default=())
    _columns: Tuple[Tuple[int, ...], ...] = field(compare=False, repr=False, default=())

    def __len__(self) -> int:
        return len(self.cells)

    def locate(self, p: Point) -> Optional[int]:
        """Id of the open cell containing ``p``; None on a line or wall."""
        k = bisect.bisect_left(self._breaks, p.x)
        candidates = self._columns[k]

        if k < len(self._breaks) and self._breaks[k] == p.x:
            candidates = candidates + self._columns[k + 1]

        for cell_id in candidates:
            if self.cells[cell_id].contains(p):
                return cell_id
        return None

    def neighbors(self, cell_id: int) -> List[int]:
        return list(self.adjacency.neighbors(cell_id))

    def faces(self) -> List[FrozenSet[int]]:
        """Group cells into the faces of the underlying line arrangement."""
        walls = nx.subgraph_view(
            self.adjacency, filter_edge=lambda u, v: self.adjacency[u][v]["kind"] == "wall"
        )
        return sorted(
            (frozenset(c) for c in nx.connected_components(walls)), key=lambda c: min(c)
        )

    def wall_abscissas(self) -> Tuple[Fraction, ...]:
        return self._breaks


def _dedupe_lines(lines: Iterable[Line]) -> List[Line]:
    return list(dict.fromkeys(lines))


def _check_lines_avoid_points(lines: Sequence[Line], ps: PointSet) -> None:
    for line in lines:
        for index, p in enumerate(ps):
            if line.contains(p):
                raise LineThroughPoint(f"line {line} passes through point {index} {p}")


def _assemble(bounds: Sequence[CellBounds], lines: Sequence[Line], ps: PointSet) -> Trapezoidation:
    """Index cells, assign points and build the adjacency graph."""
    vertical_walls = {line.c / line.a for line in lines if line.is_vertical}
    breaks = tuple(sorted({x for b in bounds for x in b[:2] if x is not None}))

    columns: List[List[int]] = [[] for _ in range(len(breaks) + 1)]
    for cell_id, (left_x, right_x, _, _) in enumerate(bounds):
        start = 0 if left_x is None else bisect.bisect_right(breaks, left_x)
        stop = len(breaks) if right_x is None else bisect.bisect_left(breaks, right_x)
        for k in range(start, stop + 1):
            columns[k].append(cell_id)

    skeleton = [Trapezoid(cell_id, *b) for cell_id, b in enumerate(bounds)]
    locator = Trapezoidation(
        tuple(skeleton), tuple(lines), (), {}, nx.Graph(), breaks, tuple(map(tuple, columns))
    )

    members: Dict[int, List[int]] = defaultdict(list)
    point_to_cell: Dict[int, int] = {}
    for index, p in enumerate(ps):
        cell_id = locator.locate(p)
        if cell_id is None:
            raise LineThroughPoint(f"point {index} {p} lies on a line or wall")
        point_to_cell[index] = cell_id
        members[cell_id].append(index)

    cells = tuple(
        Trapezoid(cell_id, *b, contained_points=tuple(members[cell_id]))
        for cell_id, b in enumerate(bounds)
    )

    graph = nx.Graph()
    graph.add_nodes_from(range(len(cells)))

    starting: Dict[Fraction, List[Trapezoid]] = defaultdict(list)
    for cell in cells:
        if cell.left_x is not None:
            starting[cell.left_x].append(cell)

    for cell in cells:
        if cell.right_x is None:
            continue
        kind = "line" if cell.right_x in vertical_walls else "wall"
        for other in starting.get(cell.right_x, ()):
            if _spans_overlap(cell, other, cell.right_x):
                graph.add_edge(cell.id, other.id, kind=kind)

    above: Dict[Line, List[Trapezoid]] = defaultdict(list)
    for cell in cells:
        if cell.floor is not None:
            above[cell.floor].append(cell)

    for cell in cells:
        if cell.ceiling is None:
            continue
        for other in above.get(cell.ceiling, ()):
            if _ranges_overlap(cell, other):
                graph.add_edge(cell.id, other.id, kind="line")

    vertices = tuple(sorted({corner for cell in cells for corner in cell.corners()}))

    return Trapezoidation(
        cells,
        tuple(lines),
        vertices,
        point_to_cell,
        graph,
        breaks,
        tuple(map(tuple, columns)),
    )


def build_trapezoidation(lines: Iterable[Line], ps: Optional[PointSet] = None) -> Trapezoidation:
    """
    Vertical decomposition of the arrangement of ``lines``.

    A wall is raised through every vertex up to the next line above and down
    to the next line below; vertical source lines act as full walls.

    Parameters
    ----------
    lines : iterable of Line
        Arrangement lines; duplicates are ignored.
    ps : PointSet, optional
        Points to assign to their open cells.

    Returns
    -------
    Trapezoidation
        The decomposition, deterministic for a given input order.

    Raises
    ------
    LineThroughPoint
        If a line passes through one of the points.
    """
    ps = ps if ps is not None else PointSet(())
    lines = _dedupe_lines(lines)
    _check_lines_avoid_points(lines, ps)

    vertical_xs = {line.c / line.a for line in lines if line.is_vertical}
    sloped = [line for line in lines if not line.is_vertical]

    breaks = set(vertical_xs)
    for i, first in enumerate(sloped):
        for second in sloped[i + 1 :]:
            crossing = first.intersection(second)
            if crossing is not None:
                breaks.add(crossing.x)
    ordered = sorted(breaks)

    def layers(x: Fraction) -> List[Tuple[Optional[Line], Optional[Line]]]:
        stack: List[Optional[Line]] = [None]
        stack += sorted(sloped, key=lambda line: line.y_at(x))
        stack.append(None)
        return list(zip(stack, stack[1:]))

    if ordered:
        columns_x = [ordered[0] - 1]
        columns_x += [(lo + hi) / 2 for lo, hi in zip(ordered, ordered[1:])]
        columns_x.append(ordered[-1] + 1)
    else:
        columns_x = [Fraction(0)]

    bounds: List[CellBounds] = []
    open_cells: Dict[Tuple[Optional[Line], Optional[Line]], Tuple[Optional[Fraction], int]] = {}

    for k, x_mid in enumerate(columns_x):
        pairs = layers(x_mid)
        boundary = ordered[k - 1] if k > 0 else None
        hard_wall = boundary in vertical_xs

        current: Dict[Tuple[Optional[Line], Optional[Line]], Tuple[Optional[Fraction], int]] = {}
        for pair in pairs:
            if pair in open_cells and not hard_wall:
                current[pair] = open_cells.pop(pair)
            else:
                current[pair] = (boundary, len(bounds))
                bounds.append((boundary, None, pair[0], pair[1]))

        for pair, (left_x, slot) in open_cells.items():
            bounds[slot] = (left_x, boundary, pair[0], pair[1])
        open_cells = current

    decomposition = _assemble(bounds, lines, ps)
    LOGGER.debug(
        "Decomposed %s lines into %s trapezoids (%s vertices)",
        len(lines),
        len(decomposition.cells),
        len(decomposition.vertices),
    )
    return decomposition


def refine_to_capacity(T: Trapezoidation, ps: PointSet, capacity: int) -> Trapezoidation:
    """
    Split overfull cells by vertical walls until each holds <= capacity points.

    Walls are placed at x-midpoints between consecutive point abscissas of the
    cell, after every ``capacity``-th point, so no wall meets a point and
    every refined cell nests inside its original cell.
    """
    if capacity < 1:
        raise InvalidParameter(f"capacity must be at least 1, got {capacity}")

    if all(len(cell.contained_points) <= capacity for cell in T.cells):
        return T

    bounds: List[CellBounds] = []
    for cell in T.cells:
        members = sorted(cell.contained_points, key=lambda i: ps[i].x)

        if len(members) <= capacity:
            bounds.append(cell.bounds)
            continue

        walls = [
            (ps[members[k - 1]].x + ps[members[k]].x) / 2
            for k in range(capacity, len(members), capacity)
        ]
        edges = [cell.left_x, *walls, cell.right_x]
        for left_x, right_x in zip(edges, edges[1:]):
            bounds.append((left_x, right_x, cell.floor, cell.ceiling))

    refined = _assemble(bounds, T.source_lines, ps)
    LOGGER.debug("Refined %s cells into %s at capacity %s", len(T), len(refined), capacity)
    return refined


def _zone(T: Trapezoidation, origin: Point, dx: Fraction, dy: Fraction, t_lo, t_hi) -> FrozenSet[int]:
    stops = set()

    for line in T.source_lines:
        rate = line.a * dx + line.b * dy
        if rate != 0:
            stops.add(-line.residual(origin) / rate)

    if dx != 0:
        for x in T.wall_abscissas():
            stops.add((x - origin.x) / dx)

    inside = sorted(
        t for t in stops if (t_lo is None or t > t_lo) and (t_hi is None or t < t_hi)
    )
    knots = ([] if t_lo is None else [t_lo]) + inside + ([] if t_hi is None else [t_hi])

    samples = [(lo + hi) / 2 for lo, hi in zip(knots, knots[1:])]
    if t_lo is None:
        samples.insert(0, knots[0] - 1 if knots else Fraction(0))
    if t_hi is None and knots:
        samples.append(knots[-1] + 1)

    zone = set()
    current: Optional[int] = None
    for t in samples:
        p = Point(origin.x + t * dx, origin.y + t * dy)

        if current is not None and T.cells[current].contains(p):
            continue

        found = None
        if current is not None:
            found = next((c for c in T.neighbors(current) if T.cells[c].contains(p)), None)
        if found is None:
            found = T.locate(p)

        current = found
        if found is not None:
            zone.add(found)

    return frozenset(zone)


def zone_of_segment(T: Trapezoidation, p: Point, q: Point) -> FrozenSet[int]:
    """
    Cells whose open interior meets the closed segment pq.

    The segment is cut at every line and wall it crosses; the cell of each
    piece is found by stepping to an adjacent cell, with point location as
    the fallback when the segment passes through a vertex.
    """
    return _zone(T, p, q.x - p.x, q.y - p.y, Fraction(0), Fraction(1))


def zone_of_line(T: Trapezoidation, line: Line) -> FrozenSet[int]:
    """Cells met by a full line."""
    origin, dx, dy = _line_parametrization(line)
    return _zone(T, origin, dx, dy, None, None)


def zone_of_segment_brute(T: Trapezoidation, p: Point, q: Point) -> FrozenSet[int]:
    """Cell-by-cell reference for :func:`zone_of_segment`."""
    dx, dy = q.x - p.x, q.y - p.y
    return frozenset(
        cell.id for cell in T.cells if cell.meets(p, dx, dy, Fraction(0), Fraction(1))
    )


def zone_of_line_brute(T: Trapezoidation, line: Line) -> FrozenSet[int]:
    return frozenset(cell.id for cell in T.cells if cell.crossed_by(line))


def cell_crossings(T: Trapezoidation, lines: Sequence[Line]) -> List[int]:
    """Number of ``lines`` crossing each cell, indexed by cell id."""
    return [sum(1 for line in lines if cell.crossed_by(line)) for cell in T.cells]


def lines_crossed(lines: Iterable[Line], p: Point, q: Point) -> int:
    """Number of lines crossed by the open segment pq."""
    return sum(1 for line in lines if segment_line_crossing(p, q, line) is not None)


def shift_off_points(lines: Iterable[Line], ps: PointSet) -> List[Line]:
    """
    Translate every line through a point of ``ps`` off the point set.

    The offset is half the smallest nonzero point residual of the line, so
    the shifted line passes through no point and no point changes side
    except those that were on the line.
    """
    shifted = []
    for line in lines:
        residuals = [line.residual(p) for p in ps]

        if all(r != 0 for r in residuals):
            shifted.append(line)
            continue

        gaps = [abs(r) for r in residuals if r != 0]
        shifted.append(line.shifted(min(gaps) / 2 if gaps else Fraction(1)))

    return _dedupe_lines(shifted)


@dataclass(frozen=True)
class CuttingSample:
    """
    A verified r-sample of the source lines.

    Attributes
    ----------
    sample : tuple of Line
        The sampled lines R.
    threshold : int
        Verified bound on the number of source lines crossing any cell.
    attempts : int
        Samples drawn until one verified.
    max_crossing : int
        Largest measured crossing count over the cells of the sample.
    """

    sample: Tuple[Line, ...]
    threshold: int
    attempts: int
    max_crossing: int


def cutting_threshold(m: int, r: int, C: Fraction) -> int:
    """floor(4*C*(m/r)*max(1, log2 r))."""
    return floor_fraction(4 * Fraction(C) * Fraction(m, r) * log_factor(r))


def sample_cutting(
    source: Sequence[Line],
    r: int,
    C: Fraction,
    seed: int,
    max_attempts: int,
) -> CuttingSample:
    """
    Draw uniform r-samples of ``source`` until one is a verified cutting.

    Parameters
    ----------
    source : sequence of Line
        Lines to sample from; duplicates are dropped first.
    r : int
        Sample size, 1 <= r <= number of distinct lines.
    C : Fraction
        Constant of the crossing bound 4C(m/r)max(1, log2 r).
    seed : int
        Seed of the attempt stream.
    max_attempts : int
        Attempts before giving up.

    Returns
    -------
    CuttingSample
        The first sample whose every cell is crossed by at most the bound.

    Raises
    ------
    CuttingNotFound
        If no sample verified within ``max_attempts``.
    """
    lines = _dedupe_lines(source)
    m = len(lines)

    if not 1 <= r <= m:
        raise InvalidParameter(f"sample size r={r} outside [1, {m}]")

    threshold = cutting_threshold(m, r, C)

    def draw(rng: np.random.Generator) -> Tuple[Line, ...]:
        picked = sorted(int(k) for k in rng.choice(m, size=r, replace=False))
        return tuple(lines[k] for k in picked)

    measured: Dict[Tuple[Line, ...], int] = {}

    def verify(sample: Tuple[Line, ...]) -> bool:
        decomposition = build_trapezoidation(sample)
        measured[sample] = max(cell_crossings(decomposition, lines), default=0)
        return measured[sample] <= threshold

    sample, attempts = draw_until_verified(
        draw, verify, seed, max_attempts, CuttingNotFound, f"{r}-sample cutting"
    )
    LOGGER.debug(
        "Cutting of %s/%s lines verified: max crossing %s <= %s",
        r,
        m,
        measured[sample],
        threshold,
    )
    return CuttingSample(sample, threshold, attempts, measured[sample])
