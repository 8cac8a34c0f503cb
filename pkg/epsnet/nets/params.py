"""Constants and the derived parameter schedule of the improved construction"""

from __future__ import annotations

import logging

from configparser import ConfigParser
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Mapping

from .. import config
from .common import binary_log, ceil_log2, ceil_power, floor_log2, log_factor, require_positive
from ..errors import InvalidParameter

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetConstants:
    """Unspecified constants of the improved construction.

    Attributes
    ----------
    c0 : Fraction
        Stage-0 crowdedness constant, 0 < c0 < 1/4.
    c_hat : Fraction
        Stage-3 constant, 0 < c_hat < 1/40.
    c1 : Fraction
        Stage-2 crossing-net step constant.
    c_prime : Fraction
        Stage-3 crossing-net step constant.
    c_cut : Fraction
        Cutting constant of the sampled cuttings.
    triangle_c : Fraction
        Sample-size constant of the strong triangle nets.
    depth_cap : int
        Recursion depth at which the quadratic net takes over.
    """

    c0: Fraction = config.C0
    c_hat: Fraction = config.C_HAT
    c1: Fraction = config.C1
    c_prime: Fraction = config.C_PRIME
    c_cut: Fraction = config.C_CUT
    triangle_c: Fraction = config.TRIANGLE_C
    depth_cap: int = config.DEPTH_CAP

    def __post_init__(self):
        if not 0 < self.c0 < Fraction(1, 4):
            raise InvalidParameter(f"C0 must lie in (0, 1/4), got {self.c0}")
        if not 0 < self.c_hat < Fraction(1, 40):
            raise InvalidParameter(f"C_hat must lie in (0, 1/40), got {self.c_hat}")
        for name in ("c1", "c_prime", "c_cut", "triangle_c"):
            require_positive(name, getattr(self, name))
        if self.depth_cap < 0:
            raise InvalidParameter(f"depth cap must be non-negative, got {self.depth_cap}")

    @classmethod
    def from_mapping(cls, values: Mapping[str, str]) -> NetConstants:
        """Build from case-insensitive ``key=value`` pairs; unknown keys are rejected."""
        known = {f.name: f for f in fields(cls)}
        parsed = {}

        for key, raw in values.items():
            name = key.strip().lower()
            if name not in known:
                raise InvalidParameter(f"unknown constant '{key}'")
            try:
                parsed[name] = int(raw) if name == "depth_cap" else Fraction(raw.strip())
            except ValueError as exc:
                raise InvalidParameter(f"constant {key}={raw!r} is not a number") from exc

        return cls(**parsed)

    @classmethod
    def from_text(cls, text: str) -> NetConstants:
        """Parse a constants file; the ``[CONSTANTS]`` header is optional."""
        parser = ConfigParser()
        if not text.lstrip().startswith("["):
            text = "[CONSTANTS]\n" + text
        parser.read_string(text)

        values = {}
        for section in parser.sections():
            values.update(parser[section])
        return cls.from_mapping(values)


@dataclass(frozen=True)
class ImprovedConfig:
    """Run configuration of the improved construction."""

    eta: Fraction = config.ETA
    eps_tilde: Fraction = config.EPS_TILDE
    seed: int = config.SEED
    max_attempts: int = config.MAX_ATTEMPTS
    constants: NetConstants = field(default_factory=NetConstants)

    def __post_init__(self):
        if not 0 < self.eta < Fraction(1, 6):
            raise InvalidParameter(f"eta must lie in (0, 1/6), got {self.eta}")
        if not 0 < self.eps_tilde <= 1:
            raise InvalidParameter(f"eps_tilde must lie in (0, 1], got {self.eps_tilde}")
        if self.max_attempts < 1:
            raise InvalidParameter(f"max_attempts must be at least 1, got {self.max_attempts}")

    def with_seed(self, seed: int) -> ImprovedConfig:
        return replace(self, seed=seed)


@dataclass(frozen=True)
class StageParams:
    """
    Parameter schedule of one improved-net instance.

    All integer parameters are exact ceilings of powers of 1/eps and every
    rational identity between them holds exactly.
    """

    eps: Fraction
    sigma: Fraction
    eta: Fraction
    eps_tilde: Fraction
    r0: int
    s0: int
    t: int
    r1: int
    r_sparse: int
    eps0: Fraction
    eps1: Fraction
    eps_hat: Fraction
    i_lo: int
    i_hi: int
    constants: NetConstants
    seed: int

    def delta(self, i: int) -> Fraction:
        """delta_i = 2^i * eps1 / 4."""
        return Fraction(2) ** i * self.eps1 / 4

    @property
    def interval(self) -> range:
        return range(self.i_lo, self.i_hi + 1)

    @property
    def zone_threshold(self) -> Fraction:
        """Stage-1 crossing threshold t * r1 * max(1, log2 r1)."""
        return self.t * self.r1 * log_factor(self.r1)


def derive_params(eps: Fraction, sigma: Fraction, cfg: ImprovedConfig, seed: int) -> StageParams:
    """
    Derive the stage parameters of an instance.

    Parameters
    ----------
    eps : Fraction
        Heaviness fraction, 0 < eps < 1.
    sigma : Fraction
        Restriction threshold, 0 < sigma <= 1.
    cfg : ImprovedConfig
        Exponent, base threshold and constants.
    seed : int
        Seed recorded for the instance's random choices.

    Returns
    -------
    StageParams
    """
    eps = require_positive("eps", eps)
    if eps >= 1:
        raise InvalidParameter(f"stage parameters need eps < 1, got {eps}")

    inverse = 1 / eps
    eta = cfg.eta

    r0 = max(2, ceil_power(inverse, eta))
    t = ceil_power(inverse, 2 * eta)
    s0 = ceil_power(inverse, 3 * eta)
    r_sparse = ceil_power(inverse, 4 * eta)
    r1 = max(r0, ceil_power(inverse, Fraction(1, 2)))
    s0 = max(r0, min(s0, r1))

    eps0 = Fraction(sigma) * eps / (100 * r0)
    eps1 = eps0 / (80 * log_factor(inverse))
    eps_hat = eps0 / (8 * t * r1 * log_factor(r1))

    i_lo = max(0, floor_log2(2 * eps_hat / (5 * eps1)))
    i_hi = ceil_log2(4 / eps1)

    params = StageParams(
        eps=eps,
        sigma=Fraction(sigma),
        eta=eta,
        eps_tilde=cfg.eps_tilde,
        r0=r0,
        s0=s0,
        t=t,
        r1=r1,
        r_sparse=r_sparse,
        eps0=eps0,
        eps1=eps1,
        eps_hat=eps_hat,
        i_lo=i_lo,
        i_hi=i_hi,
        constants=cfg.constants,
        seed=seed,
    )
    LOGGER.debug(
        "Schedule eps=%s: r0=%s s0=%s t=%s r1=%s r_sparse=%s |I|=%s log2(1/eps)=%.3f",
        eps,
        r0,
        s0,
        t,
        r1,
        r_sparse,
        len(params.interval),
        float(binary_log(inverse)),
    )
    return params
