"""Application entry point"""

import argparse
import asyncio
import logging
import sys

from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import config
from .bench import (
    ALGORITHMS,
    DEFAULT_ALGORITHMS,
    GENERATORS,
    BenchConfig,
    build_net,
    generate_points,
    render_svg,
    run_bench,
)
from .bench.io import (
    dump_net,
    format_points,
    net_to_document,
    parse_rational,
    read_constants,
    read_net,
    read_points,
    write_net,
    write_points,
)
from .errors import EpsNetError, PerturbationFailed, TooLarge
from .logger import configure_logging
from .nets.geometry import PointSet, ensure_general_position
from .nets.improved import top_level_decomposition
from .nets.params import ImprovedConfig, NetConstants
from .nets.verifier import is_weak_eps_net

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_improved_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eta", type=parse_rational, default=config.ETA, help="Schedule exponent, 0 < eta < 1/6.")
    parser.add_argument(
        "--eps-tilde",
        type=parse_rational,
        default=config.EPS_TILDE,
        help="Epsilon at or above which the quadratic net is used.",
    )
    parser.add_argument(
        "--constants",
        type=Path,
        help="File of key=value constants (C0, C_hat, C1, C_prime, C_cut, triangle_c, depth_cap).",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epsnet", description="Build and verify weak epsilon-nets for planar point sets."
    )
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging.")
    verbs = parser.add_subparsers(dest="verb")

    gen = verbs.add_parser("gen", help="Generate a point file.")
    gen.add_argument("--kind", choices=sorted(GENERATORS), default="uniform", help="Point generator.")
    gen.add_argument("--n", type=int, required=True, help="Number of points.")
    gen.add_argument("--seed", type=int, default=config.SEED, help="Generator seed.")
    gen.add_argument("--out", type=Path, help="Output point file (stdout when omitted).")

    build = verbs.add_parser("build", help="Build a net for a point file.")
    build.add_argument("--points", type=Path, required=True, help="Input point file.")
    build.add_argument("--eps", type=parse_rational, required=True, help="Heaviness fraction.")
    build.add_argument("--algo", choices=sorted(ALGORITHMS), default="improved", help="Construction.")
    build.add_argument("--seed", type=int, default=config.SEED, help="Seed of every random choice.")
    build.add_argument("--out", type=Path, help="Output net JSON (stdout when omitted).")
    build.add_argument("--svg", type=Path, help="Also render points and net to this SVG.")
    build.add_argument("--no-verify", action="store_true", help="Skip the exact verification.")
    _add_improved_flags(build)

    verify = verbs.add_parser("verify", help="Verify a net JSON against a point file.")
    verify.add_argument("--points", type=Path, required=True, help="Input point file.")
    verify.add_argument("--net", type=Path, required=True, help="Net JSON written by build.")
    verify.add_argument("--eps", type=parse_rational, help="Heaviness fraction (default: the net's).")
    verify.add_argument("--seed", type=int, default=config.SEED, help="Seed used by build.")

    bench = verbs.add_parser("bench", help="Run a sweep and write a CSV.")
    bench.add_argument("--algo", nargs="+", choices=sorted(ALGORITHMS), default=list(DEFAULT_ALGORITHMS))
    bench.add_argument("--eps", nargs="+", type=parse_rational, default=[Fraction(2, 5), Fraction(1, 4)])
    bench.add_argument("--n", nargs="+", type=int, default=[24])
    bench.add_argument("--seed", nargs="+", type=int, default=[1])
    bench.add_argument("--kind", nargs="+", choices=sorted(GENERATORS), default=["uniform"])
    bench.add_argument("--concurrency", type=int, default=4, help="Rows running at once.")
    bench.add_argument("--csv", type=Path, required=True, help="Output CSV.")
    _add_improved_flags(bench)

    render = verbs.add_parser("render", help="Render points, a net and a decomposition to SVG.")
    render.add_argument("--points", type=Path, required=True, help="Input point file.")
    render.add_argument("--net", type=Path, help="Net JSON to overlay.")
    render.add_argument("--svg", type=Path, required=True, help="Output SVG.")
    render.add_argument("--seed", type=int, default=config.SEED, help="Seed used by build.")
    render.add_argument(
        "--decomposition",
        action="store_true",
        help="Overlay the top-level refined decomposition (needs --eps).",
    )
    render.add_argument("--eps", type=parse_rational, help="Heaviness fraction of the decomposition.")
    _add_improved_flags(render)

    return parser


def _improved_config(args: argparse.Namespace, seed: int) -> ImprovedConfig:
    constants = read_constants(args.constants) if args.constants else NetConstants()
    return ImprovedConfig(eta=args.eta, eps_tilde=args.eps_tilde, seed=seed, constants=constants)


def _load_points(path: Path, seed: int) -> PointSet:
    raw = read_points(path)
    ps = ensure_general_position(raw, seed)
    if ps.points != raw.points:
        logger.warning("Input points were perturbed into general position (seed %s)", seed)
    return ps


def _gen(args: argparse.Namespace) -> int:
    ps = generate_points(args.kind, args.n, args.seed)
    if args.out:
        write_points(ps, args.out)
    else:
        sys.stdout.write(format_points(ps))
    return EXIT_OK


def _build(args: argparse.Namespace) -> int:
    cfg = _improved_config(args, args.seed)
    ps = _load_points(args.points, args.seed)
    net = build_net(args.algo, ps, args.eps, cfg)

    params = {"n": len(ps), "seed": args.seed}
    if ALGORITHMS[args.algo] is ALGORITHMS["improved"]:
        params.update(eta=cfg.eta, eps_tilde=cfg.eps_tilde)
    document = net_to_document(net, args.eps, args.algo, params)

    if args.out:
        write_net(document, args.out)
    else:
        sys.stdout.write(dump_net(document))

    if args.svg:
        render_svg(ps, net, None, args.svg)

    if args.no_verify:
        return EXIT_OK

    report = is_weak_eps_net(ps, net, args.eps)
    if not report.is_net:
        logger.error(
            "Not a weak net: %s points %s stay unpierced (threshold %s)",
            report.max_unpierced,
            report.witness,
            report.threshold,
        )
        return EXIT_FAILED

    logger.info("Verified: largest unpierced subset %s < %s", report.max_unpierced, report.threshold)
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    ps = _load_points(args.points, args.seed)
    net, eps, algorithm = read_net(args.net)
    eps = args.eps if args.eps is not None else eps

    report = is_weak_eps_net(ps, net, eps)
    if not report.is_net:
        logger.error(
            "%s net of %s points fails: %s points %s stay unpierced (threshold %s)",
            algorithm,
            len(net),
            report.max_unpierced,
            report.witness,
            report.threshold,
        )
        return EXIT_FAILED

    logger.info("%s net of %s points verified for eps=%s", algorithm, len(net), eps)
    return EXIT_OK


async def _bench(args: argparse.Namespace) -> int:
    bench_config = BenchConfig(
        algorithms=tuple(args.algo),
        eps_values=tuple(args.eps),
        ns=tuple(args.n),
        seeds=tuple(args.seed),
        generators=tuple(args.kind),
        concurrency=args.concurrency,
        improved=_improved_config(args, config.SEED),
    )
    records = await run_bench(bench_config, args.csv)

    failed = [r for r in records if r.error or not r.is_net]
    if failed:
        logger.error("%s of %s bench rows failed", len(failed), len(records))
        return EXIT_FAILED
    return EXIT_OK


def _render(args: argparse.Namespace) -> int:
    ps = _load_points(args.points, args.seed)
    net = read_net(args.net)[0] if args.net else None

    decomposition = None
    if args.decomposition:
        if args.eps is None:
            logger.error("--decomposition needs --eps")
            return EXIT_USAGE
        decomposition = top_level_decomposition(ps, args.eps, _improved_config(args, args.seed))

    render_svg(ps, net, decomposition, args.svg)
    return EXIT_OK


async def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point of the epsnet command line."""

    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(debug=args.verbose)

    if args.verb is None:
        parser.print_help()
        return EXIT_USAGE

    try:
        if args.verb == "gen":
            return _gen(args)
        if args.verb == "build":
            return _build(args)
        if args.verb == "verify":
            return _verify(args)
        if args.verb == "bench":
            return await _bench(args)
        return _render(args)
    except (TooLarge, PerturbationFailed) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        logger.error("File error: %s", exc)
        return EXIT_USAGE
    except EpsNetError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
