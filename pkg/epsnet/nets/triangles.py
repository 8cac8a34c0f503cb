"""Strong epsilon-nets with respect to triangles"""

from __future__ import annotations

import itertools
import logging

from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Tuple

import numpy as np

from .. import config
from .common import binary_log, ceil_fraction, draw_until_verified, heavy_threshold, require_positive
from .geometry import PointSet, TriangleCounter, icross, integer_frame
from ..errors import NetNotFound

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class TriangleNet:
    """
    A verified sample of P piercing every eps_hat-heavy triangle.

    Attributes
    ----------
    picks : tuple of int
        Sorted indices into P.
    eps_hat : Fraction
        Heaviness fraction the picks were verified against.
    attempts : int
        Samples drawn until one verified; 0 when all of P was taken.
    """

    picks: Tuple[int, ...]
    eps_hat: Fraction
    attempts: int


def triangle_sample_size(n: int, eps_hat: Fraction, c: Fraction = config.TRIANGLE_C) -> int:
    """min(n, ceil((c/eps_hat) * log2(2/eps_hat))); a single point when eps_hat >= 1."""
    if eps_hat >= 1:
        return min(n, 1)
    return min(n, ceil_fraction(Fraction(c) / eps_hat * binary_log(2 / eps_hat)))


def verify_strong_triangle_net(ps: PointSet, picks: Collection[int], eps_hat: Fraction) -> bool:
    """
    Check that every heavy triangle spanned by P contains a pick.

    A triangle on three points of P is heavy when its closed hull holds at
    least ceil(eps_hat*n) points of P. All C(n,3) triples are checked.
    """
    n = len(ps)
    threshold = heavy_threshold(eps_hat, n)
    picked = set(picks)
    (coords,) = integer_frame(ps.points)

    counter = TriangleCounter(coords) if ps.general_position else None
    pick_coords = [coords[i] for i in sorted(picked)]

    def closed_count(i: int, j: int, k: int) -> int:
        if counter is not None:
            return 3 + counter.interior(i, j, k)
        return sum(1 for p in coords if _in_closed(coords[i], coords[j], coords[k], p))

    for i, j, k in itertools.combinations(range(n), 3):
        if i in picked or j in picked or k in picked:
            continue
        if closed_count(i, j, k) < threshold:
            continue
        if not any(_in_closed(coords[i], coords[j], coords[k], p) for p in pick_coords):
            return False

    return True


def _in_closed(a, b, c, q) -> bool:
    d1, d2, d3 = icross(a, b, q), icross(b, c, q), icross(c, a, q)
    return not ((d1 < 0 or d2 < 0 or d3 < 0) and (d1 > 0 or d2 > 0 or d3 > 0))


def build_strong_triangle_net(
    ps: PointSet,
    eps_hat: Fraction,
    seed: int,
    max_attempts: int = config.MAX_ATTEMPTS,
    c: Fraction = config.TRIANGLE_C,
) -> TriangleNet:
    """
    Sample a strong eps_hat-net of P for triangles and verify it exactly.

    Parameters
    ----------
    ps : PointSet
        The point set P.
    eps_hat : Fraction
        Heaviness fraction, eps_hat > 0.
    seed : int
        Seed of the sampling stream.
    max_attempts : int, optional
        Samples drawn before giving up.
    c : Fraction, optional
        Sample-size constant.

    Returns
    -------
    TriangleNet
        The first sample of ``triangle_sample_size(n, eps_hat, c)`` points
        that passes :func:`verify_strong_triangle_net`.

    Raises
    ------
    NetNotFound
        If no sample verified within ``max_attempts``.
    """
    eps_hat = require_positive("eps_hat", eps_hat)
    n = len(ps)
    r = triangle_sample_size(n, eps_hat, c)

    if r >= n:
        return TriangleNet(tuple(range(n)), eps_hat, 0)

    def draw(rng: np.random.Generator) -> Tuple[int, ...]:
        return tuple(sorted(int(k) for k in rng.choice(n, size=r, replace=False)))

    picks, attempts = draw_until_verified(
        draw,
        lambda sample: verify_strong_triangle_net(ps, sample, eps_hat),
        seed,
        max_attempts,
        NetNotFound,
        f"triangle net eps_hat={eps_hat}",
    )
    LOGGER.debug("Triangle net of %s/%s points after %s attempt(s)", r, n, attempts)
    return TriangleNet(picks, eps_hat, attempts)
