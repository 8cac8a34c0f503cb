"""The Net transversal type and its provenance tags"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Tuple

from .geometry import Point


class Provenance(str, Enum):
    """Which construction step contributed a net point."""

    TRIVIAL = "Trivial"
    QUAD_LINE = "QuadLine"
    QUAD_RECURSE = "QuadRecurse"
    STAGE0 = "Stage0"
    STAGE1 = "Stage1"
    STAGE2 = "Stage2"
    STAGE3_QS0 = "Stage3-Qs0"
    STAGE3_TRIANGLE = "Stage3-Triangle"
    STAGE3_QLI = "Stage3-QLi"
    CLAMP = "Clamp"


@dataclass(frozen=True)
class Net:
    """
    A transversal Q with one provenance tag per point.

    Points are kept in insertion order and are distinct; merging nets keeps
    the tag of the first occurrence of a point.
    """

    points: Tuple[Point, ...] = ()
    provenance: Tuple[Provenance, ...] = ()

    def __post_init__(self):
        if len(self.points) != len(self.provenance):
            raise ValueError(
                f"{len(self.points)} points but {len(self.provenance)} provenance tags"
            )

    @classmethod
    def tagged(cls, points: Iterable[Point], tag: Provenance) -> Net:
        points = tuple(dict.fromkeys(points))
        return cls(points, (tag,) * len(points))

    @classmethod
    def merge(cls, *nets: Net) -> Net:
        seen = {}
        for net in nets:
            for point, tag in zip(net.points, net.provenance):
                seen.setdefault(point, tag)
        return cls(tuple(seen), tuple(seen.values()))

    def retagged(self, tag: Provenance) -> Net:
        return Net(self.points, (tag,) * len(self.points))

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def tags(self) -> frozenset:
        return frozenset(self.provenance)
