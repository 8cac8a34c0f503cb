"""Point files, net JSON, constants files and bench CSV"""

from __future__ import annotations

import json
import logging

from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import pandas as pd

from ..errors import InvalidParameter
from ..nets.geometry import Point, PointSet
from ..nets.net import Net, Provenance
from ..nets.params import NetConstants

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class BenchRecord:
    """
    One bench row.

    Attributes
    ----------
    n : int
        Number of points.
    eps : str
        Heaviness fraction as a decimal string.
    algorithm : str
        ``trivial``, ``quadratic`` or ``improved``.
    seed : int
        Row seed.
    net_size : int
        Points in the constructed net, 0 when construction failed.
    max_unpierced : int
        Largest unpierced subset found by the verifier.
    threshold : int
        ceil(eps*n).
    is_net : bool
        max_unpierced < threshold.
    build_ms, verify_ms : float
        Wall-clock milliseconds.
    generator : str
        Point generator of the row.
    error : str
        Error message of a failed row, empty otherwise.
    unclamped_size : int
        Net size before nets larger than P were replaced by P, 0 when construction failed.
    """

    n: int
    eps: str
    algorithm: str
    seed: int
    net_size: int
    max_unpierced: int
    threshold: int
    is_net: bool
    build_ms: float
    verify_ms: float
    generator: str = ""
    error: str = ""
    unclamped_size: int = 0

    def __post_init__(self):
        if not self.error and self.is_net != (self.max_unpierced < self.threshold):
            raise ValueError(f"row n={self.n} eps={self.eps}: is_net disagrees with its counts")


BENCH_COLUMNS: Tuple[str, ...] = tuple(f.name for f in fields(BenchRecord))

_COLUMN_TYPES = {
    "n": int,
    "eps": str,
    "algorithm": str,
    "seed": int,
    "net_size": int,
    "max_unpierced": int,
    "threshold": int,
    "is_net": bool,
    "build_ms": float,
    "verify_ms": float,
    "generator": str,
    "error": str,
    "unclamped_size": int,
}


def format_decimal(value: Fraction, digits: int = 6) -> str:
    """Shortest decimal string for ``value``, rounded to ``digits`` places."""
    text = f"{float(value):.{digits}f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParameter(f"'{text}' is not a decimal or p/q rational") from exc


def parse_points(text: str) -> PointSet:
    """Parse ``x y`` lines; ``#`` starts a comment and blank lines are skipped."""
    points = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        values = line.split()
        if len(values) != 2:
            raise InvalidParameter(f"line {number}: expected 'x y', got {raw!r}")
        points.append(Point(parse_rational(values[0]), parse_rational(values[1])))

    return PointSet(tuple(points))


def format_points(ps: PointSet) -> str:
    return "".join(f"{p.x} {p.y}\n" for p in ps)


def read_points(path: PathLike) -> PointSet:
    ps = parse_points(Path(path).read_text(encoding="utf-8"))
    LOGGER.debug("Read %s points from %s", len(ps), path)
    return ps


def write_points(ps: PointSet, path: PathLike) -> None:
    Path(path).write_text(format_points(ps), encoding="utf-8")
    LOGGER.info("Wrote %s points to %s", len(ps), path)


def net_to_document(
    net: Net, eps: Fraction, algorithm: str, params: Mapping[str, Any]
) -> Dict[str, Any]:
    """Net JSON document; rationals are serialized as ``p/q`` strings."""
    return {
        "epsilon": str(Fraction(eps)),
        "algorithm": algorithm,
        "params": {key: str(value) for key, value in params.items()},
        "points": [
            {"x": str(p.x), "y": str(p.y), "stage": tag.value}
            for p, tag in zip(net.points, net.provenance)
        ],
        "size": len(net),
    }


def net_from_document(document: Mapping[str, Any]) -> Tuple[Net, Fraction, str]:
    """Inverse of :func:`net_to_document`: the net, its epsilon and its algorithm."""
    try:
        entries = document["points"]
        points = tuple(Point(parse_rational(e["x"]), parse_rational(e["y"])) for e in entries)
        provenance = tuple(Provenance(e["stage"]) for e in entries)
        eps = parse_rational(document["epsilon"])
        algorithm = str(document["algorithm"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed net document: {exc}") from exc

    net = Net(points, provenance)
    if document.get("size", len(net)) != len(net):
        raise InvalidParameter(f"net document declares size {document['size']} but lists {len(net)} points")
    return net, eps, algorithm


def dump_net(document: Mapping[str, Any]) -> str:
    return json.dumps(document, indent=2) + "\n"


def write_net(document: Mapping[str, Any], path: PathLike) -> None:
    Path(path).write_text(dump_net(document), encoding="utf-8")
    LOGGER.info("Wrote net of %s points to %s", document["size"], path)


def read_net(path: PathLike) -> Tuple[Net, Fraction, str]:
    with open(path, "r", encoding="utf-8") as f:
        return net_from_document(json.load(f))


def read_constants(path: PathLike) -> NetConstants:
    return NetConstants.from_text(Path(path).read_text(encoding="utf-8"))


def records_frame(records: Sequence[BenchRecord]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in records], columns=list(BENCH_COLUMNS))


def write_bench_csv(records: Sequence[BenchRecord], path: PathLike) -> None:
    records_frame(records).to_csv(path, index=False)
    LOGGER.info("Wrote %s bench rows to %s", len(records), path)


def read_bench_csv(path: PathLike) -> List[BenchRecord]:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)

    if tuple(frame.columns) != BENCH_COLUMNS:
        raise InvalidParameter(f"unexpected bench header {list(frame.columns)}")

    records = []
    for row in frame.to_dict(orient="records"):
        values = {}
        for name, kind in _COLUMN_TYPES.items():
            raw = row[name]
            values[name] = raw == "True" if kind is bool else kind(raw)
        records.append(BenchRecord(**values))
    return records
