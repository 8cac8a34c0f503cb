"""Common methods used across net constructions"""

import logging
import math

from fractions import Fraction
from typing import Callable, Optional, Type, TypeVar

import numpy as np

from ..errors import AttemptsExhausted, InvalidParameter

LOGGER = logging.getLogger(__name__)

T = TypeVar("T")


def draw_until_verified(
    draw: Callable[[np.random.Generator], T],
    verify: Callable[[T], bool],
    seed: int,
    max_attempts: int,
    error: Type[AttemptsExhausted],
    label: str,
) -> tuple[T, int]:
    """
    Draw random candidates until one passes verification.

    Parameters
    ----------
    draw : callable
        Produces a candidate from a seeded generator.
    verify : callable
        Exact acceptance test for a candidate.
    seed : int
        Seed of the attempt stream; attempt ``k`` uses its own child stream.
    max_attempts : int
        Maximum number of candidates to draw.
    error : type
        Exception raised when every attempt fails.
    label : str
        Name used in log lines.

    Returns
    -------
    tuple
        The accepted candidate and the 1-based attempt number.
    """
    for attempt in range(max_attempts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(attempt,)))
        candidate = draw(rng)

        if verify(candidate):
            LOGGER.debug("%s verified on attempt %s/%s", label, attempt + 1, max_attempts)
            return candidate, attempt + 1

        LOGGER.debug(
            "%s rejected, redrawing (attempt %s/%s)...", label, attempt + 1, max_attempts
        )

    raise error(f"{label}: no verified sample in {max_attempts} attempts")


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 63-bit seed for the sub-task addressed by ``keys``."""
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def binary_log(value) -> Fraction:
    """
    log2 of a positive value, as a Fraction.

    The logarithm is rounded once to the nearest double and then used as an
    exact rational, so every identity built from it holds exactly.
    """
    return Fraction(math.log2(Fraction(value)))


def log_factor(value) -> Fraction:
    """max(1, log2 value), the logarithmic factor used in every threshold."""
    return max(Fraction(1), binary_log(value))


def floor_log2(value: Fraction) -> int:
    """Exact floor of log2 for a positive rational."""
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"log2 of non-positive value {value}")

    k = value.numerator.bit_length() - value.denominator.bit_length()
    while Fraction(2) ** k > value:
        k -= 1
    while Fraction(2) ** (k + 1) <= value:
        k += 1
    return k


def ceil_log2(value: Fraction) -> int:
    """Exact ceiling of log2 for a positive rational."""
    k = floor_log2(value)
    return k if Fraction(2) ** k == Fraction(value) else k + 1


def ceil_fraction(value: Fraction) -> int:
    return -((-Fraction(value).numerator) // Fraction(value).denominator)


def floor_fraction(value: Fraction) -> int:
    return Fraction(value).numerator // Fraction(value).denominator


def heavy_threshold(eps: Fraction, n: int) -> int:
    """The number of points an eps-heavy set must contain, ceil(eps*n)."""
    return ceil_fraction(Fraction(eps) * n)


def require_positive(name: str, value: Optional[Fraction]) -> Fraction:
    """Validate a strictly positive parameter."""
    if value is None or Fraction(value) <= 0:
        raise InvalidParameter(f"{name} must be positive, got {value}")
    return Fraction(value)


def ceil_power(base: Fraction, exponent: Fraction) -> int:
    """
    Exact ceiling of ``base ** exponent`` for base >= 1 and rational exponent >= 0.

    With exponent p/q, k >= base**(p/q) iff k**q >= base**p, so the float
    estimate is corrected with integer-power comparisons.
    """
    base, exponent = Fraction(base), Fraction(exponent)
    if base < 1 or exponent < 0:
        raise InvalidParameter(f"ceil_power expects base >= 1, exponent >= 0, got {base}, {exponent}")

    p, q = exponent.numerator, exponent.denominator
    target = base**p
    k = max(1, math.ceil(float(base) ** float(exponent)))

    while k > 1 and Fraction(k - 1) ** q >= target:
        k -= 1
    while Fraction(k) ** q < target:
        k += 1
    return k
