"""Exact rational planar primitives"""

from __future__ import annotations

import logging
import math

from dataclasses import dataclass
from enum import Enum, IntEnum
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import PerturbationFailed

LOGGER = logging.getLogger(__name__)

PERTURB_EXPONENT = 40
PERTURB_RESOLUTION = 2**20


@dataclass(frozen=True, order=True, slots=True)
class Point:
    """A planar point with exact rational coordinates."""

    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "Point":
        """Build a point, coercing ints and strings like ``"3/4"`` to Fraction."""
        return cls(Fraction(x), Fraction(y))


class Orientation(IntEnum):
    """Turn direction of an ordered point triple."""

    CLOCKWISE = -1
    COLLINEAR = 0
    COUNTERCLOCKWISE = 1


class HullLocation(Enum):
    """Position of a point relative to a closed convex polygon."""

    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def cross(a: Point, b: Point, c: Point) -> Fraction:
    """Twice the signed area of triangle abc."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def orient(a: Point, b: Point, c: Point) -> Orientation:
    """
    Classify the turn a -> b -> c exactly.

    Parameters
    ----------
    a, b, c : Point
        The ordered triple.

    Returns
    -------
    Orientation
        Sign of the determinant of (b - a, c - a).
    """
    det = cross(a, b, c)

    if det > 0:
        return Orientation.COUNTERCLOCKWISE
    if det < 0:
        return Orientation.CLOCKWISE

    return Orientation.COLLINEAR


@dataclass(frozen=True, slots=True)
class Line:
    """
    The locus ``a*x + b*y = c``.

    The coefficients are normalized so the leading nonzero entry of
    ``(a, b)`` equals 1, which makes equal lines compare equal.
    """

    a: Fraction
    b: Fraction
    c: Fraction

    @classmethod
    def from_coefficients(cls, a, b, c) -> "Line":
        a, b, c = Fraction(a), Fraction(b), Fraction(c)

        if a == 0 and b == 0:
            raise ValueError("degenerate line: a and b are both zero")

        lead = a if a != 0 else b
        return cls(a / lead, b / lead, c / lead)

    @classmethod
    def through(cls, p: Point, q: Point) -> "Line":
        """The line L_{p,q} spanned by two distinct points."""
        if p == q:
            raise ValueError(f"cannot span a line by a repeated point {p}")

        a = q.y - p.y
        b = p.x - q.x
        return cls.from_coefficients(a, b, a * p.x + b * p.y)

    @classmethod
    def vertical(cls, x) -> "Line":
        return cls(Fraction(1), Fraction(0), Fraction(x))

    @classmethod
    def horizontal(cls, y) -> "Line":
        return cls(Fraction(0), Fraction(1), Fraction(y))

    @property
    def is_vertical(self) -> bool:
        return self.b == 0

    def residual(self, p: Point) -> Fraction:
        """Signed value ``a*x + b*y - c``; zero exactly on the line."""
        return self.a * p.x + self.b * p.y - self.c

    def contains(self, p: Point) -> bool:
        return self.residual(p) == 0

    def y_at(self, x: Fraction) -> Fraction:
        """Height of a non-vertical line above abscissa ``x``."""
        return (self.c - self.a * x) / self.b

    def shifted(self, delta: Fraction) -> "Line":
        """Translate the line by changing its offset ``c``."""
        return Line(self.a, self.b, self.c + delta)

    def intersection(self, other: "Line") -> Optional[Point]:
        """Unique common point, or None for parallel or equal lines."""
        det = self.a * other.b - self.b * other.a

        if det == 0:
            return None

        x = (self.c * other.b - self.b * other.c) / det
        y = (self.a * other.c - self.c * other.a) / det
        return Point(x, y)


@dataclass(frozen=True)
class PointSet:
    """
    The underlying point set P.

    Attributes
    ----------
    points : tuple of Point
        The points, in input order.
    general_position : bool
        Certificate that no three points are collinear and no two points
        share an x-coordinate.
    """

    points: Tuple[Point, ...]
    general_position: bool = False

    @classmethod
    def of(cls, coordinates: Iterable, general_position: bool = False) -> "PointSet":
        return cls(tuple(Point.of(x, y) for x, y in coordinates), general_position)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, index: int) -> Point:
        return self.points[index]

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def subset(self, indices: Sequence[int]) -> "PointSet":
        """Restrict to ``indices``; general position is inherited by subsets."""
        return PointSet(tuple(self.points[i] for i in indices), self.general_position)


def segment_line_crossing(p: Point, q: Point, line: Line) -> Optional[Point]:
    """
    Exact crossing of the open segment pq with a line.

    Parameters
    ----------
    p, q : Point
        Segment endpoints.
    line : Line
        The crossing line.

    Returns
    -------
    Point or None
        The unique intersection when the endpoints lie strictly on opposite
        sides of ``line``; None when the segment misses the line, lies on it,
        or merely touches it at an endpoint.
    """
    sp = line.residual(p)
    sq = line.residual(q)

    if sp == 0 or sq == 0 or (sp > 0) == (sq > 0):
        return None

    t = sp / (sp - sq)
    return Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))


def convex_hull(points: Iterable[Point]) -> List[Point]:
    """
    Counterclockwise convex hull by the monotone chain.

    Collinear boundary points are dropped. Inputs with at most two distinct
    points come back deduplicated.
    """
    pts = sorted(set(points))

    if len(pts) <= 2:
        return pts

    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)

    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    return lower[:-1] + upper[:-1]


def _on_closed_segment(a: Point, b: Point, q: Point) -> bool:
    return (
        cross(a, b, q) == 0
        and min(a.x, b.x) <= q.x <= max(a.x, b.x)
        and min(a.y, b.y) <= q.y <= max(a.y, b.y)
    )


def point_in_hull(q: Point, hull: Sequence[Point]) -> HullLocation:
    """Classify ``q`` against a polygon returned by :func:`convex_hull`."""
    if not hull:
        return HullLocation.OUTSIDE

    if len(hull) == 1:
        return HullLocation.BOUNDARY if hull[0] == q else HullLocation.OUTSIDE

    if len(hull) == 2:
        on = _on_closed_segment(hull[0], hull[1], q)
        return HullLocation.BOUNDARY if on else HullLocation.OUTSIDE

    on_edge = False
    for k, a in enumerate(hull):
        det = cross(a, hull[(k + 1) % len(hull)], q)

        if det < 0:
            return HullLocation.OUTSIDE
        if det == 0:
            on_edge = True

    return HullLocation.BOUNDARY if on_edge else HullLocation.INTERIOR


def in_closed_triangle(a: Point, b: Point, c: Point, q: Point) -> bool:
    """Closed containment of ``q`` in triangle abc (any orientation)."""
    d1 = cross(a, b, q)
    d2 = cross(b, c, q)
    d3 = cross(c, a, q)

    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def _direction_key(dx: Fraction, dy: Fraction) -> Tuple[int, Fraction]:
    if dx == 0:
        return (1, Fraction(0))
    return (0, dy / dx)


def is_general_position(points: Sequence[Point]) -> bool:
    """True iff x-coordinates are distinct and no three points are collinear."""
    if len({p.x for p in points}) != len(points):
        return False

    for i, p in enumerate(points):
        seen = set()
        for j, q in enumerate(points):
            if i == j:
                continue

            key = _direction_key(q.x - p.x, q.y - p.y)
            if key in seen:
                return False
            seen.add(key)

    return True


def smallest_coordinate_gap(points: Sequence[Point]) -> Fraction:
    """Smallest nonzero difference between two x- or two y-coordinates."""
    gap: Optional[Fraction] = None

    for values in ({p.x for p in points}, {p.y for p in points}):
        ordered = sorted(values)
        for lo, hi in zip(ordered, ordered[1:]):
            if gap is None or hi - lo < gap:
                gap = hi - lo

    return gap if gap is not None else Fraction(1)


def ensure_general_position(ps: PointSet, seed: int, max_retries: int = 8) -> PointSet:
    """
    Certify general position, perturbing the points if necessary.

    Parameters
    ----------
    ps : PointSet
        Input points.
    seed : int
        Seed of the perturbation stream; a fixed seed gives identical output.
    max_retries : int, optional
        Number of fresh perturbations tried before giving up.

    Returns
    -------
    PointSet
        The input itself (certified) when already generic, otherwise a
        perturbed copy whose coordinates moved by less than 2^-40 times
        the smallest nonzero coordinate gap.

    Raises
    ------
    PerturbationFailed
        On duplicate points, or when no perturbation succeeded.
    """
    points = list(ps.points)

    if len(set(points)) != len(points):
        raise PerturbationFailed(
            f"{len(points) - len(set(points))} duplicate point(s) in input"
        )

    if is_general_position(points):
        return PointSet(tuple(points), general_position=True)

    scale = smallest_coordinate_gap(points) / 2**PERTURB_EXPONENT
    step = scale / (PERTURB_RESOLUTION + 1)

    for attempt in range(max_retries):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(attempt,)))
        offsets = rng.integers(
            -PERTURB_RESOLUTION, PERTURB_RESOLUTION, size=(len(points), 2), endpoint=True
        )

        moved = [
            Point(p.x + int(dx) * step, p.y + int(dy) * step)
            for p, (dx, dy) in zip(points, offsets)
        ]

        if is_general_position(moved):
            LOGGER.debug("General position reached after %s perturbation(s)", attempt + 1)
            return PointSet(tuple(moved), general_position=True)

        LOGGER.debug(
            "Perturbation left degeneracies (attempt %s/%s)", attempt + 1, max_retries
        )

    raise PerturbationFailed(f"no generic perturbation found in {max_retries} attempts")


def integer_frame(*groups: Sequence[Point]) -> List[List[Tuple[int, int]]]:
    """
    Scale point groups by a common denominator to integer coordinates.

    Orientation signs are invariant under a common positive scaling, so
    predicates evaluated in the frame agree exactly with the rational ones.
    """
    denominators = [c.denominator for group in groups for p in group for c in (p.x, p.y)]
    scale = math.lcm(*denominators) if denominators else 1

    return [
        [(int(p.x * scale), int(p.y * scale)) for p in group]
        for group in groups
    ]


def icross(a: Tuple[int, int], b: Tuple[int, int], c: Tuple[int, int]) -> int:
    """:func:`cross` on integer-frame coordinates."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


class TriangleCounter:
    """
    Constant-time interior counts for triangles spanned by a generic point set.

    ``below[a][b]`` holds the number of points strictly between ``a`` and
    ``b`` in x-order that lie strictly below the segment ab; any triangle
    count follows from three table entries. Requires distinct x-coordinates
    and no three collinear points.
    """

    def __init__(self, coords: Sequence[Tuple[int, int]]):
        self.coords = list(coords)
        n = len(self.coords)
        self.rank = sorted(range(n), key=lambda i: self.coords[i][0])
        self.position = {index: pos for pos, index in enumerate(self.rank)}
        self.below = [[0] * n for _ in range(n)]

        for pa in range(n):
            a = self.coords[self.rank[pa]]
            for pb in range(pa + 1, n):
                b = self.coords[self.rank[pb]]
                count = 0
                for pk in range(pa + 1, pb):
                    if icross(a, b, self.coords[self.rank[pk]]) < 0:
                        count += 1
                self.below[pa][pb] = count

    def interior(self, i: int, j: int, k: int) -> int:
        """Points of the set strictly inside triangle (i, j, k)."""
        p1, p2, p3 = sorted((self.position[i], self.position[j], self.position[k]))
        a, b, c = (self.coords[self.rank[p]] for p in (p1, p2, p3))
        outer = self.below[p1][p3]
        inner = self.below[p1][p2] + self.below[p2][p3]

        if icross(a, c, b) > 0:
            return inner - outer
        return outer - inner - 1
