"""Exact weak-net verification by largest unpierced subsets"""

from __future__ import annotations

import functools
import itertools
import logging

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

from .. import config
from .common import heavy_threshold, require_positive
from .geometry import (
    HullLocation,
    Point,
    PointSet,
    TriangleCounter,
    convex_hull,
    icross,
    integer_frame,
    point_in_hull,
)
from .improved import RestrictionGraph
from .net import Net
from ..errors import TooLarge

LOGGER = logging.getLogger(__name__)

IPoint = Tuple[int, int]


def _hull_avoids(points: Sequence[Point], q: Sequence[Point]) -> bool:
    hull = convex_hull(points)
    return all(point_in_hull(w, hull) is HullLocation.OUTSIDE for w in q)


@dataclass(frozen=True)
class VerifyReport:
    """
    Outcome of a weak-net check.

    Attributes
    ----------
    max_unpierced : int
        Size of the largest subset of P whose closed hull avoids Q.
    witness : tuple of int
        Indices of such a subset.
    threshold : int
        ceil(eps*n); Q is a net iff max_unpierced < threshold.
    is_net : bool
    """

    max_unpierced: int
    witness: Tuple[int, ...]
    threshold: int
    is_net: bool

    def __post_init__(self):
        if self.is_net != (self.max_unpierced < self.threshold):
            raise ValueError(
                f"inconsistent report: {self.max_unpierced} unpierced vs threshold {self.threshold}"
            )


def _angle_order(v: IPoint):
    """Comparator sorting points of the upper half-plane at ``v`` counterclockwise."""

    def compare(a: IPoint, b: IPoint) -> int:
        turn = icross(v, a, b)
        return -1 if turn > 0 else (1 if turn < 0 else 0)

    return functools.cmp_to_key(compare)


def _delta(a: IPoint, b: IPoint) -> IPoint:
    return b[0] - a[0], b[1] - a[1]


def _compare_directions(a: IPoint, b: IPoint) -> int:
    turn = a[0] * b[1] - a[1] * b[0]
    return -1 if turn > 0 else (1 if turn < 0 else 0)


# Orders directions lying in a common open half-plane counterclockwise.
_DIRECTION_KEY = functools.cmp_to_key(_compare_directions)


def _direction_rank(e: IPoint, d: IPoint) -> int:
    """0 along ``e``, 2 against it, 1 strictly left of it."""
    turn = e[0] * d[1] - e[1] * d[0]
    if turn > 0:
        return 1
    return 0 if e[0] * d[0] + e[1] * d[1] > 0 else 2


def _direction_after(e: IPoint, d1: IPoint, d2: IPoint) -> bool:
    """Is direction ``d2`` strictly counterclockwise of ``d1``, both in the closed left half at ``e``?"""
    r1, r2 = _direction_rank(e, d1), _direction_rank(e, d2)
    if r1 != r2:
        return r2 > r1
    if r1 != 1:
        return False
    return d1[0] * d2[1] - d1[1] * d2[0] > 0


def _anchor_best(
    v: int,
    coords: Sequence[IPoint],
    q_coords: Sequence[IPoint],
    blocked: set,
    counter: TriangleCounter,
) -> Tuple[int, Tuple[int, ...]]:
    """Largest unpierced subset whose lowest point is ``v``, as (size, hull vertices)."""
    origin = coords[v]

    def is_above(p: IPoint) -> bool:
        return p[1] > origin[1] or (p[1] == origin[1] and p[0] > origin[0])

    key = _angle_order(origin)
    above = sorted(
        (i for i, p in enumerate(coords) if i != v and i not in blocked and is_above(p)),
        key=lambda i: key(coords[i]),
    )
    walls = sorted((w for w in q_coords if is_above(w)), key=key)

    best_size, best_chain = 1, (v,)
    m = len(above)

    # Segment (v, a) avoids Q.
    for a in above:
        pa = coords[a]
        if not any(
            icross(origin, pa, w) == 0
            and min(origin[0], pa[0]) <= w[0] <= max(origin[0], pa[0])
            and min(origin[1], pa[1]) <= w[1] <= max(origin[1], pa[1])
            for w in walls
        ):
            if best_size < 2:
                best_size, best_chain = 2, (v, a)

    # free[i][j]: closed triangle (v, above[i], above[j]) holds no Q point.
    free = [[False] * m for _ in range(m)]
    for i in range(m):
        pi = coords[above[i]]
        e = (pi[0] - origin[0], pi[1] - origin[1])
        start = 0
        while start < len(walls) and icross(origin, pi, walls[start]) < 0:
            start += 1

        pointer, steepest = start, None
        for j in range(i + 1, m):
            pj = coords[above[j]]
            while pointer < len(walls) and icross(origin, pj, walls[pointer]) <= 0:
                w = walls[pointer]
                d = (w[0] - pi[0], w[1] - pi[1])
                if steepest is None or _direction_after(e, steepest, d):
                    steepest = d
                pointer += 1

            target = (pj[0] - pi[0], pj[1] - pi[1])
            free[i][j] = steepest is None or _direction_after(e, steepest, target)

    # best[(i, j)]: largest count of a convex chain v, ..., above[i], above[j]
    # whose fan triangles are all free, counting chain vertices and points
    # strictly inside the fan, but not v itself.
    best: Dict[Tuple[int, int], int] = {}
    parent: Dict[Tuple[int, int], Optional[Tuple[int, int]]] = {}

    for i in range(m):
        for j in range(i + 1, m):
            if free[i][j]:
                best[(i, j)] = 2 + counter.interior(v, above[i], above[j])
                parent[(i, j)] = None

    for j in range(m):
        pj = coords[above[j]]
        incoming = [i for i in range(j) if (i, j) in best]
        outgoing = [k for k in range(j + 1, m) if free[j][k]]
        if not incoming or not outgoing:
            continue

        # A left turn at above[j] means the incoming direction precedes the outgoing one.
        incoming.sort(key=lambda i: _DIRECTION_KEY(_delta(coords[above[i]], pj)))
        outgoing.sort(key=lambda k: _DIRECTION_KEY(_delta(pj, coords[above[k]])))

        pointer, top, top_i = 0, None, None
        for k in outgoing:
            d_out = _delta(pj, coords[above[k]])
            while pointer < len(incoming):
                d_in = _delta(coords[above[incoming[pointer]]], pj)
                if d_in[0] * d_out[1] - d_in[1] * d_out[0] <= 0:
                    break
                candidate = best[(incoming[pointer], j)]
                if top is None or candidate > top:
                    top, top_i = candidate, incoming[pointer]
                pointer += 1

            if top is None:
                continue
            extended = top + 1 + counter.interior(v, above[j], above[k])
            if extended > best[(j, k)]:
                best[(j, k)] = extended
                parent[(j, k)] = (top_i, j)

    for (i, j), size in best.items():
        if size + 1 > best_size:
            chain = [above[j]]
            link: Optional[Tuple[int, int]] = (i, j)
            while link is not None:
                chain.append(above[link[0]])
                link = parent[link]
            best_size, best_chain = size + 1, (v, *reversed(chain))

    return best_size, best_chain


def max_unpierced_subset(
    ps: PointSet, q: Sequence[Point]
) -> Tuple[int, Tuple[int, ...]]:
    """
    Largest subset of P whose closed convex hull contains no point of Q.

    Parameters
    ----------
    ps : PointSet
        General-position point set.
    q : sequence of Point
        The candidate transversal; its points may be degenerate.

    Returns
    -------
    tuple
        The maximum size and the sorted indices of a subset achieving it.

    Raises
    ------
    TooLarge
        If ``ps`` exceeds the configured verification ceiling.
    """
    n = len(ps)

    if n > config.MAX_VERIFY_N:
        raise TooLarge(f"verification is limited to {config.MAX_VERIFY_N} points, got {n}")
    if n == 0:
        return 0, ()

    coords, q_coords = integer_frame(ps.points, list(q))
    q_set = set(q_coords)
    blocked = {i for i, p in enumerate(coords) if p in q_set}
    counter = TriangleCounter(coords)

    best_size, best_chain = 0, ()
    for v in range(n):
        if v in blocked:
            continue
        size, chain = _anchor_best(v, coords, q_coords, blocked, counter)
        if size > best_size:
            best_size, best_chain = size, chain

    if not best_chain:
        return 0, ()

    hull = convex_hull([ps[i] for i in best_chain])
    witness = tuple(
        i for i, p in enumerate(ps) if point_in_hull(p, hull) is not HullLocation.OUTSIDE
    )

    if len(witness) != best_size or not _hull_avoids([ps[i] for i in witness], q):
        raise RuntimeError(
            f"unpierced witness of size {best_size} failed its exact recheck"
        )

    return best_size, witness


def brute_force_unpierced(ps: PointSet, q: Sequence[Point]) -> int:
    """Exhaustive counterpart of :func:`max_unpierced_subset` for small P."""
    n = len(ps)

    if n > config.MAX_BRUTE_N:
        raise TooLarge(f"exhaustive search is limited to {config.MAX_BRUTE_N} points, got {n}")

    for size in range(n, 0, -1):
        for subset in itertools.combinations(ps.points, size):
            if _hull_avoids(subset, q):
                return size
    return 0


def is_weak_eps_net(
    ps: PointSet, net: Union[Net, Sequence[Point]], eps: Fraction
) -> VerifyReport:
    """
    Decide whether Q pierces every convex set holding ceil(eps*n) points of P.

    Parameters
    ----------
    ps : PointSet
        The point set P.
    net : Net or sequence of Point
        The candidate transversal Q.
    eps : Fraction
        Heaviness fraction, eps > 0.

    Returns
    -------
    VerifyReport
    """
    eps = require_positive("eps", eps)
    points = list(net.points if isinstance(net, Net) else net)
    threshold = heavy_threshold(eps, len(ps))

    size, witness = max_unpierced_subset(ps, points)
    report = VerifyReport(size, witness, threshold, size < threshold)

    LOGGER.debug(
        "Verified |Q|=%s against n=%s eps=%s: max unpierced %s, threshold %s",
        len(points),
        len(ps),
        eps,
        size,
        threshold,
    )
    return report


def find_restricted_violation(
    ps: PointSet,
    q: Sequence[Point],
    pi: RestrictionGraph,
    eps: Fraction,
    sigma: Fraction,
) -> Optional[Tuple[int, ...]]:
    """
    Search for an unpierced (eps, sigma)-restricted set.

    Returns indices of ceil(eps*n) points spanning at least
    sigma*C(ceil(eps*n), 2) edges of ``pi`` whose closed hull avoids Q, or
    None when every such set is pierced. Limited to 14 points.
    """
    n = len(ps)

    if n > 14:
        raise TooLarge(f"restricted search is limited to 14 points, got {n}")

    k = heavy_threshold(eps, n)
    need = Fraction(sigma) * k * (k - 1) / 2

    for subset in itertools.combinations(range(n), k):
        inside = sum(1 for a, b in itertools.combinations(subset, 2) if pi.has_edge(a, b))
        if inside < need:
            continue
        if _hull_avoids([ps[i] for i in subset], q):
            return subset

    return None
