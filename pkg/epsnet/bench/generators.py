"""Seeded point-set generators"""

import logging
import math

from fractions import Fraction
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..errors import InvalidParameter
from ..nets.geometry import Point, PointSet, ensure_general_position

LOGGER = logging.getLogger(__name__)

DENOMINATOR = 2**32
CIRCLE_DENOMINATOR = 2**20
CLUSTER_COUNT = 4
CLUSTER_SPREAD = 0.05


def _on_grid(value: float) -> Fraction:
    return Fraction(int(round(value * DENOMINATOR)), DENOMINATOR)


def _uniform(n: int, rng: np.random.Generator) -> List[Point]:
    raw = rng.integers(0, DENOMINATOR, size=(n, 2))
    return [Point(Fraction(int(x), DENOMINATOR), Fraction(int(y), DENOMINATOR)) for x, y in raw]


def _grid(n: int, rng: np.random.Generator) -> List[Point]:
    side = math.isqrt(n - 1) + 1
    return [Point(Fraction(k % side, side), Fraction(k // side, side)) for k in range(n)]


def _convex(n: int, rng: np.random.Generator) -> List[Point]:
    """Points on the unit circle via the rational parametrization t = tan(theta/2)."""
    angles = 2 * np.pi * (np.arange(n) + 0.3) / n
    points = []

    for angle in angles:
        t = Fraction(float(np.tan(angle / 2))).limit_denominator(CIRCLE_DENOMINATOR)
        scale = 1 + t * t
        points.append(Point((1 - t * t) / scale, 2 * t / scale))

    return points


def _clusters(n: int, rng: np.random.Generator) -> List[Point]:
    centers = rng.uniform(0.2, 0.8, size=(CLUSTER_COUNT, 2))
    offsets = rng.normal(0.0, CLUSTER_SPREAD, size=(n, 2))

    return [
        Point(_on_grid(centers[k % CLUSTER_COUNT][0] + dx), _on_grid(centers[k % CLUSTER_COUNT][1] + dy))
        for k, (dx, dy) in enumerate(offsets)
    ]


GENERATORS: Dict[str, Callable[[int, np.random.Generator], List[Point]]] = {
    "uniform": _uniform,
    "grid": _grid,
    "convex": _convex,
    "clusters": _clusters,
}


def generate_points(kind: str, n: int, seed: int) -> PointSet:
    """
    Generate a general-position point set.

    Parameters
    ----------
    kind : str
        One of ``uniform``, ``grid``, ``convex``, ``clusters``.
    n : int
        Number of points, at least 1.
    seed : int
        Seed; the output is a function of (kind, n, seed).

    Returns
    -------
    PointSet
        Certified general-position points with rational coordinates.
    """
    if kind not in GENERATORS:
        raise InvalidParameter(f"unknown generator '{kind}', expected one of {sorted(GENERATORS)}")
    if n < 1:
        raise InvalidParameter(f"need at least one point, got n={n}")

    rng = np.random.default_rng(seed)
    points: Tuple[Point, ...] = tuple(dict.fromkeys(GENERATORS[kind](n, rng)))

    if len(points) != n:
        raise InvalidParameter(f"{kind} generator produced duplicate points for n={n}, seed={seed}")

    ps = ensure_general_position(PointSet(points), seed)
    LOGGER.debug("Generated %s %s points (seed %s)", n, kind, seed)
    return ps
