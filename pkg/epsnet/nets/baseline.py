"""Trivial and quadratic weak epsilon-nets"""

from __future__ import annotations

import functools
import logging

from fractions import Fraction

from .common import ceil_fraction, floor_fraction, heavy_threshold, require_positive
from .geometry import Line, PointSet
from .net import Net, Provenance
from .slabs import line_crossing_net

LOGGER = logging.getLogger(__name__)


def trivial_net(ps: PointSet) -> Net:
    """All of P; pierces every non-empty subset."""
    return Net.tagged(ps.points, Provenance.TRIVIAL)


def quadratic_net(ps: PointSet, eps: Fraction) -> Net:
    """
    Weak eps-net of size O(1/eps^2) by median splitting.

    Parameters
    ----------
    ps : PointSet
        General-position point set.
    eps : Fraction
        Heaviness fraction, eps > 0.

    Returns
    -------
    Net
        For eps >= 1 the lowest (then leftmost) point; P itself when
        ceil(eps*n) <= 1; otherwise every step-th crossing of the median
        vertical line with the edges of P, step = max(1, floor(eps^2 n^2/16)),
        plus the nets of both halves at parameter 4*eps/3.
    """
    eps = require_positive("eps", eps)
    n = len(ps)

    if n == 0:
        return Net()

    if eps >= 1:
        lowest = min(ps.points, key=lambda p: (p.y, p.x))
        return Net.tagged([lowest], Provenance.TRIVIAL)

    if heavy_threshold(eps, n) <= 1:
        return trivial_net(ps)

    order = sorted(range(n), key=lambda i: ps[i].x)
    half = n // 2
    left, right = order[:half], order[half:]
    median = Line.vertical((ps[left[-1]].x + ps[right[0]].x) / 2)

    left_side = set(left)
    edges = [
        (ps[i], ps[j])
        for i in range(n)
        for j in range(i + 1, n)
        if (i in left_side) != (j in left_side)
    ]
    step = max(1, floor_fraction(eps * eps * n * n / 16))
    crossing = line_crossing_net(median, edges, step)

    child_eps = eps * 4 / 3
    net = Net.merge(
        Net.tagged(crossing.picks, Provenance.QUAD_LINE),
        quadratic_net(ps.subset(left), child_eps).retagged(Provenance.QUAD_RECURSE),
        quadratic_net(ps.subset(right), child_eps).retagged(Provenance.QUAD_RECURSE),
    )
    LOGGER.debug("Quadratic net n=%s eps=%s: %s points (step %s)", n, eps, len(net), step)
    return net


@functools.lru_cache(maxsize=None)
def quadratic_size_bound(eps: Fraction) -> int:
    """Unrolled size bound B(eps) = 2*B(4*eps/3) + ceil(16/eps^2), B = 1 for eps >= 1."""
    eps = require_positive("eps", eps)

    if eps >= 1:
        return 1
    return 2 * quadratic_size_bound(eps * 4 / 3) + ceil_fraction(16 / (eps * eps))
