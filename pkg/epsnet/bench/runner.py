"""Bench sweeps over algorithms, epsilons, sizes, seeds and generators"""

import asyncio
import itertools
import logging
import time

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .generators import GENERATORS, generate_points
from .io import BenchRecord, format_decimal, write_bench_csv
from ..errors import EpsNetError, InvalidParameter
from ..nets.baseline import quadratic_net, quadratic_size_bound, trivial_net
from ..nets.common import derive_seed, heavy_threshold
from ..nets.geometry import PointSet
from ..nets.improved import improved_net
from ..nets.net import Net, Provenance
from ..nets.params import ImprovedConfig
from ..nets.verifier import is_weak_eps_net

LOGGER = logging.getLogger(__name__)

ALGORITHMS: Dict[str, Callable[[PointSet, Fraction, ImprovedConfig], Net]] = {
    "trivial": lambda ps, eps, cfg: trivial_net(ps),
    "quadratic": lambda ps, eps, cfg: quadratic_net(ps, eps),
    "improved": lambda ps, eps, cfg: improved_net(ps, eps, cfg),
}
ALGORITHMS["rubin"] = ALGORITHMS["improved"]

DEFAULT_ALGORITHMS: Tuple[str, ...] = ("trivial", "quadratic", "improved")


def build_net(algorithm: str, ps: PointSet, eps: Fraction, cfg: Optional[ImprovedConfig] = None) -> Net:
    """Build a net with the named algorithm."""
    if algorithm not in ALGORITHMS:
        raise InvalidParameter(f"unknown algorithm '{algorithm}', expected one of {sorted(ALGORITHMS)}")
    return ALGORITHMS[algorithm](ps, Fraction(eps), cfg if cfg is not None else ImprovedConfig())


@dataclass(frozen=True)
class BenchConfig:
    """
    A bench sweep.

    Attributes
    ----------
    algorithms : tuple of str
        Subset of ``trivial``, ``quadratic``, ``improved`` (alias ``rubin``).
    eps_values : tuple of Fraction
    ns : tuple of int
    seeds : tuple of int
    generators : tuple of str
    concurrency : int
        Rows running at once.
    improved : ImprovedConfig
        Configuration handed to the improved construction.
    """

    algorithms: Tuple[str, ...] = DEFAULT_ALGORITHMS
    eps_values: Tuple[Fraction, ...] = (Fraction(2, 5), Fraction(1, 4), Fraction(3, 20))
    ns: Tuple[int, ...] = (24,)
    seeds: Tuple[int, ...] = (1,)
    generators: Tuple[str, ...] = ("uniform",)
    concurrency: int = 4
    improved: ImprovedConfig = field(default_factory=ImprovedConfig)

    def __post_init__(self):
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise InvalidParameter(f"unknown algorithm '{name}'")
        for name in self.generators:
            if name not in GENERATORS:
                raise InvalidParameter(f"unknown generator '{name}'")
        for eps in self.eps_values:
            if eps <= 0:
                raise InvalidParameter(f"eps must be positive, got {eps}")
        if any(n < 1 for n in self.ns):
            raise InvalidParameter(f"sizes must be at least 1, got {self.ns}")
        if self.concurrency < 1:
            raise InvalidParameter(f"concurrency must be at least 1, got {self.concurrency}")

    def rows(self) -> List[Tuple[str, Fraction, int, int, str]]:
        """(algorithm, eps, n, seed, generator) per row, in sweep order."""
        return list(itertools.product(self.algorithms, self.eps_values, self.ns, self.seeds, self.generators))


def run_row(
    algorithm: str, eps: Fraction, n: int, seed: int, generator: str, cfg: ImprovedConfig
) -> BenchRecord:
    """
    Generate, build and verify one row; construction errors land in the error column.

    A net with more points than P is replaced by P itself, keeping every row at most n points.
    The size before that replacement is kept in ``unclamped_size``.
    """
    eps = Fraction(eps)
    base = dict(n=n, eps=format_decimal(eps), algorithm=algorithm, seed=seed, generator=generator)
    threshold = heavy_threshold(eps, n)

    try:
        ps = generate_points(generator, n, seed)
        start = time.perf_counter()
        net = build_net(algorithm, ps, eps, cfg.with_seed(derive_seed(cfg.seed, seed, n)))
        build_ms = (time.perf_counter() - start) * 1000

        unclamped_size = len(net)
        if unclamped_size > len(ps):
            LOGGER.debug("Row %s n=%s eps=%s: %s net points clamped to P", algorithm, n, eps, unclamped_size)
            net = trivial_net(ps).retagged(Provenance.CLAMP)

        start = time.perf_counter()
        report = is_weak_eps_net(ps, net, eps)
        verify_ms = (time.perf_counter() - start) * 1000
    except EpsNetError as exc:
        LOGGER.error("Row %s n=%s eps=%s seed=%s %s failed: %s", algorithm, n, eps, seed, generator, exc)
        return BenchRecord(
            **base, net_size=0, max_unpierced=0, threshold=threshold, is_net=False,
            build_ms=0.0, verify_ms=0.0, error=f"{type(exc).__name__}: {exc}",
        )

    if not report.is_net:
        LOGGER.error(
            "Row %s n=%s eps=%s seed=%s %s: %s points left unpierced (threshold %s)",
            algorithm, n, eps, seed, generator, report.max_unpierced, report.threshold,
        )
    if algorithm == "quadratic" and unclamped_size > quadratic_size_bound(eps):
        LOGGER.warning("Quadratic net of %s points exceeds its bound %s", unclamped_size, quadratic_size_bound(eps))

    return BenchRecord(
        **base,
        net_size=len(net),
        max_unpierced=report.max_unpierced,
        threshold=report.threshold,
        is_net=report.is_net,
        build_ms=round(build_ms, 3),
        verify_ms=round(verify_ms, 3),
        unclamped_size=unclamped_size,
    )


def size_slopes(records: Sequence[BenchRecord]) -> Dict[str, float]:
    """Least-squares slope of log(net size before clamping) against log(1/eps), per algorithm."""
    slopes = {}

    for algorithm in sorted({r.algorithm for r in records}):
        rows = [r for r in records if r.algorithm == algorithm and not r.error and r.net_size > 0]
        if len({r.eps for r in rows}) < 2:
            continue
        x = np.log([1 / float(Fraction(r.eps)) for r in rows])
        y = np.log([r.unclamped_size or r.net_size for r in rows])
        slopes[algorithm] = float(np.polyfit(x, y, 1)[0])

    return slopes


async def run_bench(config: BenchConfig, csv_path: Optional[Path] = None) -> List[BenchRecord]:
    """
    Run every row of a sweep concurrently and write the CSV once.

    Parameters
    ----------
    config : BenchConfig
        The sweep.
    csv_path : Path, optional
        Destination of the CSV; nothing is written when omitted.

    Returns
    -------
    list of BenchRecord
        One record per (algorithm, eps, n, seed, generator), in sweep order.
    """
    semaphore = asyncio.Semaphore(config.concurrency)
    rows = config.rows()
    LOGGER.info("Running %s bench rows with concurrency %s", len(rows), config.concurrency)

    async def guarded(row) -> BenchRecord:
        async with semaphore:
            return await asyncio.to_thread(run_row, *row, config.improved)

    records = list(await asyncio.gather(*(guarded(row) for row in rows)))

    if csv_path is not None:
        write_bench_csv(records, csv_path)

    for algorithm, slope in size_slopes(records).items():
        LOGGER.info("Log-log size slope for %s: %.3f", algorithm, slope)

    return records
