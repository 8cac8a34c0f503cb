"""Equal-count vertical slabs, crowded-set nets and crossing nets on vertical lines"""

from __future__ import annotations

import bisect
import logging

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .common import require_positive
from .geometry import Line, Point, PointSet, segment_line_crossing
from .net import Net, Provenance
from ..errors import InvalidParameter, TooFewPoints

LOGGER = logging.getLogger(__name__)

NetBuilder = Callable[[PointSet, Fraction], Net]


@dataclass(frozen=True)
class Slab:
    """Open vertical strip (left_x, right_x) with the indices of its points."""

    left_x: Optional[Fraction]
    right_x: Optional[Fraction]
    points: Tuple[int, ...]

    def holds(self, x: Fraction) -> bool:
        return (self.left_x is None or self.left_x < x) and (
            self.right_x is None or x < self.right_x
        )


@dataclass(frozen=True)
class SlabDecomposition:
    """
    The vertical lines Y(r) and the slabs of P they cut out.

    Attributes
    ----------
    lines : tuple of Line
        Vertical separators, sorted by abscissa.
    slabs : tuple of Slab
        The ``len(lines) + 1`` slabs, left to right.
    r : int
        Number of separators actually placed.
    """

    lines: Tuple[Line, ...]
    slabs: Tuple[Slab, ...]
    r: int

    @property
    def abscissas(self) -> List[Fraction]:
        return [line.c for line in self.lines]

    def slab_of(self, x: Fraction) -> int:
        """Index of the slab holding abscissa ``x`` (which must avoid the separators)."""
        return bisect.bisect_left(self.abscissas, x)

    def lines_inside(self, slab: Slab) -> List[Line]:
        """Separators lying strictly inside ``slab``."""
        return [line for line in self.lines if slab.holds(line.c)]


def _split_even(indices: Sequence[int], parts: int) -> List[List[int]]:
    size, extra = divmod(len(indices), parts)
    groups, start = [], 0

    for k in range(parts):
        stop = start + size + (1 if k < extra else 0)
        groups.append(list(indices[start:stop]))
        start = stop

    return groups


def _slabs_from_groups(ps: PointSet, groups: Sequence[Sequence[int]]) -> SlabDecomposition:
    walls = [
        (ps[left[-1]].x + ps[right[0]].x) / 2 for left, right in zip(groups, groups[1:])
    ]
    edges = [None, *walls, None]
    slabs = tuple(
        Slab(lo, hi, tuple(group)) for lo, hi, group in zip(edges, edges[1:], groups)
    )
    return SlabDecomposition(tuple(Line.vertical(x) for x in walls), slabs, len(walls))


def build_slabs(ps: PointSet, r: int) -> SlabDecomposition:
    """
    Cut P into r+1 vertical slabs of near-equal size.

    Parameters
    ----------
    ps : PointSet
        Points with pairwise distinct abscissas.
    r : int
        Requested number of separators; clamped to ``n - 1``.

    Returns
    -------
    SlabDecomposition
        Every slab holds between floor(n/(r+1)) and ceil(n/(r+1)) points and
        each separator sits at the x-midpoint of two consecutive points.

    Raises
    ------
    TooFewPoints
        If ``ps`` is empty.
    """
    n = len(ps)

    if n == 0:
        raise TooFewPoints("cannot build slabs over an empty point set")
    if r < 1:
        raise InvalidParameter(f"slab count r must be at least 1, got {r}")

    if r >= n:
        LOGGER.debug("Clamping slab separators from %s to %s", r, n - 1)
        r = n - 1

    order = sorted(range(n), key=lambda i: ps[i].x)
    return _slabs_from_groups(ps, _split_even(order, r + 1))


def refine_slabs(decomposition: SlabDecomposition, ps: PointSet, s: int) -> SlabDecomposition:
    """
    Refine a slab decomposition towards ``s`` separators.

    Each slab is split into the same number of equal-count sub-slabs, so
    every separator of ``decomposition`` survives in the result.
    """
    if s <= decomposition.r:
        return decomposition

    parts = -(-(s + 1) // (decomposition.r + 1))
    groups: List[List[int]] = []

    for slab in decomposition.slabs:
        order = sorted(slab.points, key=lambda i: ps[i].x)
        groups.extend(_split_even(order, max(1, min(parts, len(order)))))

    refined = _slabs_from_groups(ps, groups)
    LOGGER.debug("Refined %s separators into %s", decomposition.r, refined.r)
    return refined


@dataclass(frozen=True)
class CrossingNet:
    """Every ``step``-th crossing (1-indexed, y-sorted) of a vertical line."""

    line: Line
    picks: Tuple[Point, ...]
    step: int


def line_crossing_net(
    line: Line, segments: Iterable[Tuple[Point, Point]], step: int
) -> CrossingNet:
    """
    Pick every ``step``-th crossing point of a vertical line with segments.

    Crossings follow the open-segment convention and are ordered by
    (y, segment index). A step of 0 picks nothing.
    """
    if not line.is_vertical:
        raise InvalidParameter(f"crossing nets are taken on vertical lines, got {line}")
    if step < 0:
        raise InvalidParameter(f"step must be non-negative, got {step}")

    if step == 0:
        return CrossingNet(line, (), 0)

    crossings = []
    for index, (p, q) in enumerate(segments):
        point = segment_line_crossing(p, q, line)
        if point is not None:
            crossings.append((point.y, index, point))

    crossings.sort(key=lambda item: (item[0], item[1]))
    picks = tuple(point for _, _, point in crossings[step - 1 :: step])

    return CrossingNet(line, picks, step)


def crowded_net(
    ps: PointSet,
    r: int,
    eps_prime: Fraction,
    recurse: NetBuilder,
    tag: Provenance = Provenance.STAGE0,
    slabs: Optional[SlabDecomposition] = None,
) -> Net:
    """
    Pierce every convex set holding eps_prime*n points of P inside one slab.

    Parameters
    ----------
    ps : PointSet
        The point set P.
    r : int
        Number of slab separators.
    eps_prime : Fraction
        Crowdedness fraction, relative to ``n = len(ps)``.
    recurse : callable
        Net builder invoked as ``recurse(P_tau, eps_tau)`` per slab.
    tag : Provenance
        Tag given to every returned point.
    slabs : SlabDecomposition, optional
        A prebuilt decomposition of ``ps`` with ``r`` separators.

    Returns
    -------
    Net
        Union of the slab nets, or all of P when ``n <= 2r``.
    """
    eps_prime = require_positive("eps_prime", eps_prime)
    n = len(ps)

    if n <= 2 * r:
        return Net.tagged(ps.points, tag)

    slabs = slabs if slabs is not None else build_slabs(ps, r)
    parts = []

    for slab in slabs.slabs:
        if not slab.points:
            continue

        eps_slab = min(Fraction(1), eps_prime * n / len(slab.points))
        parts.append(recurse(ps.subset(slab.points), eps_slab))

    net = Net.merge(*parts).retagged(tag)
    LOGGER.debug(
        "Crowded net over %s slabs at eps'=%s: %s points", len(slabs.slabs), eps_prime, len(net)
    )
    return net
