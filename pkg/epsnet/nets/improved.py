"""The recursive weak epsilon-net construction over restricted instances"""

from __future__ import annotations

import functools
import itertools
import logging

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .. import config
from .arrangement import (
    CuttingSample,
    Trapezoidation,
    build_trapezoidation,
    refine_to_capacity,
    sample_cutting,
    shift_off_points,
    zone_of_line,
)
from .baseline import quadratic_net, trivial_net
from .common import ceil_fraction, derive_seed, floor_fraction, heavy_threshold
from .geometry import Line, Point, PointSet, cross
from .net import Net, Provenance
from .params import ImprovedConfig, StageParams, derive_params
from .slabs import NetBuilder, SlabDecomposition, build_slabs, crowded_net, line_crossing_net, refine_slabs
from .triangles import build_strong_triangle_net
from ..errors import InvalidParameter

LOGGER = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class RestrictionGraph:
    """
    An edge set over the indices 0..n-1 of a point set.

    Attributes
    ----------
    n : int
        Number of vertices.
    edges : frozenset of (int, int)
        Pairs ``(a, b)`` with ``a < b``.
    """

    n: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        for a, b in self.edges:
            if not 0 <= a < b < self.n:
                raise InvalidParameter(f"edge ({a}, {b}) invalid for {self.n} vertices")

    @classmethod
    def of(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> RestrictionGraph:
        """Normalize and deduplicate ``pairs``."""
        edges = set()
        for a, b in pairs:
            if a == b:
                raise InvalidParameter(f"self-loop on vertex {a}")
            edges.add((a, b) if a < b else (b, a))
        return cls(n, frozenset(edges))

    @classmethod
    def complete(cls, n: int) -> RestrictionGraph:
        return cls(n, frozenset(itertools.combinations(range(n), 2)))

    @property
    def density(self) -> Fraction:
        """|edges| / C(n, 2)."""
        pairs = self.n * (self.n - 1) // 2
        return Fraction(len(self.edges), pairs) if pairs else Fraction(0)

    def has_edge(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self.edges

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def without(self, other: RestrictionGraph) -> RestrictionGraph:
        return RestrictionGraph(self.n, self.edges - other.edges)

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Instance:
    """A restricted instance (P, Pi, eps, sigma) at some recursion depth."""

    ps: PointSet
    pi: RestrictionGraph
    eps: Fraction
    sigma: Fraction = Fraction(1)
    depth: int = 0
    seed: int = config.SEED

    def __post_init__(self):
        if self.eps <= 0:
            raise InvalidParameter(f"eps must be positive, got {self.eps}")
        if not 0 < self.sigma <= 1:
            raise InvalidParameter(f"sigma must lie in (0, 1], got {self.sigma}")
        if self.pi.n != len(self.ps):
            raise InvalidParameter(
                f"restriction graph over {self.pi.n} vertices for {len(self.ps)} points"
            )

    @classmethod
    def top_level(cls, ps: PointSet, eps: Fraction, seed: int = config.SEED) -> Instance:
        """The unrestricted instance: all edges of P and sigma = 1."""
        return cls(ps, RestrictionGraph.complete(len(ps)), Fraction(eps), Fraction(1), 0, seed)


class Route(str, Enum):
    """How an instance is resolved."""

    QUADRATIC = "quadratic"
    TRIVIAL = "trivial"
    SPARSE = "sparse"
    DEPTH_CAP = "depth-cap"
    STAGES = "stages"


@dataclass
class CallRecord:
    """One invocation of :func:`build_weak_net`."""

    index: int
    parent: Optional[int]
    depth: int
    n: int
    eps: Fraction
    density: Fraction
    sigma: Fraction
    route: Route
    net_size: Optional[int] = None
    clamped: bool = False

    def progresses_from(self, parent: CallRecord) -> bool:
        """Child calls grow eps or shrink the density, the point count or sigma."""
        return (
            self.eps > parent.eps
            or self.density < parent.density
            or self.n < parent.n
            or self.sigma < parent.sigma
        )


@dataclass
class RecursionTrace:
    """Every call made while building one net, in call order."""

    calls: List[CallRecord] = field(default_factory=list)

    def record(self, inst: Instance, route: Route, parent: Optional[int]) -> CallRecord:
        call = CallRecord(
            index=len(self.calls),
            parent=parent,
            depth=inst.depth,
            n=len(inst.ps),
            eps=inst.eps,
            density=inst.pi.density,
            sigma=inst.sigma,
            route=route,
        )
        self.calls.append(call)
        return call

    @property
    def max_depth(self) -> int:
        return max((call.depth for call in self.calls), default=0)

    def children(self, index: int) -> List[CallRecord]:
        return [call for call in self.calls if call.parent == index]

    def stalled(self) -> List[CallRecord]:
        """Child calls that made no progress over their parent."""
        return [
            call
            for call in self.calls
            if call.parent is not None and not call.progresses_from(self.calls[call.parent])
        ]


@dataclass(frozen=True)
class SectorPartition:
    """
    Radial sectors of the edges leaving one point of a slab.

    Attributes
    ----------
    center : int
        Index of the point p.
    radial_order : tuple of int
        The other slab points, clockwise around p from the upward direction.
    block_size : int
        Edges per block, ceil(2 * delta_i * n).
    z : int
        Number of blocks.
    sectors : tuple of tuple of int
        Three cyclically consecutive blocks each, or one sector holding every
        edge when there are fewer than three blocks.
    rich : tuple of bool
        Whether each sector holds at least eps_hat*n/10 short edges.
    """

    center: int
    radial_order: Tuple[int, ...]
    block_size: int
    z: int
    sectors: Tuple[Tuple[int, ...], ...]
    rich: Tuple[bool, ...]

    def rich_neighbors(self) -> FrozenSet[int]:
        return frozenset(
            q for sector, rich in zip(self.sectors, self.rich) if rich for q in sector
        )


def _clockwise_from_up(center: Point):
    def half(p: Point) -> int:
        dx, dy = p.x - center.x, p.y - center.y
        return 0 if dx > 0 or (dx == 0 and dy > 0) else 1

    def compare(a: Point, b: Point) -> int:
        ha, hb = half(a), half(b)
        if ha != hb:
            return ha - hb
        turn = cross(center, a, b)
        return -1 if turn < 0 else (1 if turn > 0 else 0)

    return functools.cmp_to_key(compare)


def sector_partition(
    ps: PointSet,
    p: int,
    tau_points: Sequence[int],
    cell_of: Mapping[int, int],
    delta_i: Fraction,
    n: int,
    eps_hat: Fraction,
) -> SectorPartition:
    """
    Partition the edges from ``p`` to the other slab points into sectors.

    Parameters
    ----------
    ps : PointSet
        The ambient point set.
    p : int
        Center point, a member of ``tau_points``.
    tau_points : sequence of int
        Indices of the slab's points.
    cell_of : mapping
        Point index -> id of its decomposition cell.
    delta_i : Fraction
        Block fraction; blocks hold ceil(2 * delta_i * n) edges.
    n : int
        Size of the ambient point set.
    eps_hat : Fraction
        Richness fraction; a sector is rich with eps_hat*n/10 short edges.

    Returns
    -------
    SectorPartition
    """
    key = _clockwise_from_up(ps[p])
    order = tuple(sorted((q for q in tau_points if q != p), key=lambda q: key(ps[q])))

    block_size = max(1, ceil_fraction(2 * delta_i * n))
    blocks = [order[k : k + block_size] for k in range(0, len(order), block_size)]
    z = len(blocks)

    if z < 3:
        sectors: Tuple[Tuple[int, ...], ...] = (order,)
    else:
        sectors = tuple(
            blocks[j] + blocks[(j + 1) % z] + blocks[(j + 2) % z] for j in range(z)
        )

    home = cell_of.get(p)
    need = eps_hat * n / 10
    rich = tuple(
        home is not None and sum(1 for q in sector if cell_of.get(q) == home) >= need
        for sector in sectors
    )
    return SectorPartition(p, order, block_size, z, sectors, rich)


def build_rich_graph(
    ps: PointSet,
    tau_points: Sequence[int],
    cell_of: Mapping[int, int],
    delta_i: Fraction,
    eps_hat: Fraction,
    n: int,
) -> RestrictionGraph:
    """Edges pq lying in a rich sector of p or of q, over the slab's points."""
    pairs = []
    for p in tau_points:
        partition = sector_partition(ps, p, tau_points, cell_of, delta_i, n, eps_hat)
        pairs.extend((p, q) for q in partition.rich_neighbors())
    return RestrictionGraph.of(len(ps), pairs)


def _edge_lines(ps: PointSet, pi: RestrictionGraph) -> List[Line]:
    return [Line.through(ps[a], ps[b]) for a, b in pi.sorted_edges()]


def _edge_segments(ps: PointSet, pi: RestrictionGraph) -> List[Tuple[Point, Point]]:
    return [(ps[a], ps[b]) for a, b in pi.sorted_edges()]


def sparse_case_net(inst: Instance, r: int, recurse: NetBuilder) -> Net:
    """
    Net for an instance whose restriction graph is sparse.

    Parameters
    ----------
    inst : Instance
        The restricted instance.
    r : int
        Number of slab separators.
    recurse : callable
        Builder for the crowded sub-instances.

    Returns
    -------
    Net
        All of P when ``n <= 2r``; otherwise the crowded net of the slabs at
        sigma*eps/4 plus, on every separator, every
        floor(sigma*C(ceil(eps*n), 2)/(2r))-th crossing with an edge of Pi.
    """
    if r < 1:
        raise InvalidParameter(f"sparse case needs r >= 1, got {r}")

    ps, n = inst.ps, len(inst.ps)
    if n <= 2 * r:
        return Net.tagged(ps.points, Provenance.STAGE1)

    slabs = build_slabs(ps, r)
    parts = [
        crowded_net(ps, r, inst.sigma * inst.eps / 4, recurse, Provenance.STAGE1, slabs)
    ]

    k = heavy_threshold(inst.eps, n)
    step = floor_fraction(inst.sigma * (k * (k - 1) // 2) / (2 * r))
    segments = _edge_segments(ps, inst.pi)

    for line in slabs.lines:
        picks = line_crossing_net(line, segments, step).picks
        parts.append(Net.tagged(picks, Provenance.STAGE1))

    return Net.merge(*parts)


def stage0(inst: Instance, params: StageParams, recurse: NetBuilder) -> Tuple[Net, SlabDecomposition]:
    """Pierce the (C0*sigma*eps)-crowded sets of the slabs of Y(r0)."""
    slabs = build_slabs(inst.ps, params.r0)
    eps_prime = params.constants.c0 * inst.sigma * inst.eps
    q0 = crowded_net(inst.ps, params.r0, eps_prime, recurse, Provenance.STAGE0, slabs)
    return q0, slabs


@dataclass(frozen=True)
class SigmaDecomposition:
    """
    The refined decomposition of a verified cutting sample and Y(s0).

    Attributes
    ----------
    cutting : CuttingSample
        The verified sample of the edge lines of Pi.
    sample_lines : tuple of Line
        The sample lines, translated off the points of P.
    slabs_s0 : SlabDecomposition
        The refinement Y(s0) of Y(r0).
    sigma : Trapezoidation
        Vertical decomposition of the sample and Y(s0), refined to
        capacity ceil(n/r1^2).
    """

    cutting: CuttingSample
    sample_lines: Tuple[Line, ...]
    slabs_s0: SlabDecomposition
    sigma: Trapezoidation


def build_sigma(
    inst: Instance,
    params: StageParams,
    slabs_r0: SlabDecomposition,
    max_attempts: int = config.MAX_ATTEMPTS,
) -> SigmaDecomposition:
    """Sample a cutting of the edge lines of Pi and decompose it with Y(s0)."""
    ps, n = inst.ps, len(inst.ps)
    source = _edge_lines(ps, inst.pi)
    r = min(params.r1, len(set(source)))

    cutting = sample_cutting(
        source, r, params.constants.c_cut, derive_seed(params.seed, 2), max_attempts
    )
    sample_lines = tuple(shift_off_points(cutting.sample, ps))
    slabs_s0 = refine_slabs(slabs_r0, ps, params.s0)

    arrangement = build_trapezoidation([*sample_lines, *slabs_s0.lines], ps)
    capacity = max(1, ceil_fraction(Fraction(n, params.r1**2)))
    sigma = refine_to_capacity(arrangement, ps, capacity)

    LOGGER.debug(
        "Sigma: %s sample lines + %s separators, %s cells at capacity %s",
        len(sample_lines),
        slabs_s0.r,
        len(sigma),
        capacity,
    )
    return SigmaDecomposition(cutting, sample_lines, slabs_s0, sigma)


def stage1(
    inst: Instance,
    params: StageParams,
    sigma: Trapezoidation,
    recurse: Callable[[RestrictionGraph], Net],
) -> Tuple[Net, RestrictionGraph]:
    """
    Split off the edges whose lines cross many cells of Sigma.

    Returns the net of the sub-instance restricted to those edges, with
    sigma halved, and the remaining edges.
    """
    limit = params.zone_threshold
    heavy = [
        (a, b)
        for a, b in inst.pi.sorted_edges()
        if len(zone_of_line(sigma, Line.through(inst.ps[a], inst.ps[b]))) > limit
    ]
    pi_t = RestrictionGraph.of(inst.pi.n, heavy)
    remaining = inst.pi.without(pi_t)

    LOGGER.debug(
        "Stage 1: %s of %s edges cross more than %s cells", len(pi_t), len(inst.pi), limit
    )
    return recurse(pi_t).retagged(Provenance.STAGE1), remaining


def stage2(
    params: StageParams,
    slabs: SlabDecomposition,
    sample_lines: Sequence[Line],
    sigma: Trapezoidation,
    ps: PointSet,
) -> Net:
    """
    Vertices of Sigma, the crossings X of Y(r0) with the sample, and
    every ceil(C1*eps*n)-th crossing of each line of Y(r0) with P x X.
    """
    n = len(ps)
    crossings = dict.fromkeys(
        point
        for separator in slabs.lines
        for line in sample_lines
        if (point := separator.intersection(line)) is not None
    )
    x_points = list(crossings)

    parts = [Net.tagged(sigma.vertices, Provenance.STAGE2), Net.tagged(x_points, Provenance.STAGE2)]

    step = ceil_fraction(params.constants.c1 * params.eps * n)
    segments = [(p, x) for p in ps for x in x_points]
    for separator in slabs.lines:
        picks = line_crossing_net(separator, segments, step).picks
        parts.append(Net.tagged(picks, Provenance.STAGE2))

    return Net.merge(*parts)


def stage3(
    inst: Instance,
    params: StageParams,
    slabs_r0: SlabDecomposition,
    slabs_s0: SlabDecomposition,
    sigma: Trapezoidation,
    recurse: NetBuilder,
    max_attempts: int = config.MAX_ATTEMPTS,
) -> Net:
    """
    Assemble Q(s0), the strong triangle net and the nets Q_L(i).

    Parameters
    ----------
    inst : Instance
        The instance being solved.
    params : StageParams
        Its parameter schedule.
    slabs_r0, slabs_s0 : SlabDecomposition
        Y(r0) and its refinement Y(s0).
    sigma : Trapezoidation
        The refined decomposition; its cells define short edges.
    recurse : callable
        Builder for the crowded sub-instances of Q(s0).
    max_attempts : int, optional
        Attempts of the strong triangle net.

    Returns
    -------
    Net
    """
    ps, n = inst.ps, len(inst.ps)
    constants = params.constants

    parts = [
        crowded_net(
            ps, slabs_s0.r, constants.c_hat * params.eps1, recurse, Provenance.STAGE3_QS0, slabs_s0
        )
    ]

    triangle_net = build_strong_triangle_net(
        ps,
        constants.c_hat * params.eps_hat,
        derive_seed(params.seed, 3),
        max_attempts,
        constants.triangle_c,
    )
    parts.append(Net.tagged([ps[i] for i in triangle_net.picks], Provenance.STAGE3_TRIANGLE))

    for slab in slabs_r0.slabs:
        separators = slabs_s0.lines_inside(slab)
        if not separators or len(slab.points) < 2:
            continue

        for i in params.interval:
            delta = params.delta(i)
            rich = build_rich_graph(ps, slab.points, sigma.point_to_cell, delta, params.eps_hat, n)
            if not rich.edges:
                continue

            step = ceil_fraction(constants.c_prime * params.eps1 * delta * n * n)
            segments = _edge_segments(ps, rich)
            for separator in separators:
                picks = line_crossing_net(separator, segments, step).picks
                parts.append(Net.tagged(picks, Provenance.STAGE3_QLI))

    return Net.merge(*parts)


def choose_route(inst: Instance, cfg: ImprovedConfig) -> Route:
    """Dispatch an instance to a base case or to the stages."""
    n = len(inst.ps)

    if inst.eps >= cfg.eps_tilde:
        return Route.QUADRATIC
    if heavy_threshold(inst.eps, n) <= 1 or n < 1 / inst.eps:
        return Route.TRIVIAL
    if inst.pi.density <= inst.eps:
        return Route.SPARSE
    if inst.depth >= cfg.constants.depth_cap:
        return Route.DEPTH_CAP
    return Route.STAGES


def _crowded_recursion(
    inst: Instance, cfg: ImprovedConfig, trace: Optional[RecursionTrace], parent: Optional[int]
) -> NetBuilder:
    """Builder for crowded sub-instances: full edge set, sigma = 1, one level deeper."""
    counter = itertools.count()

    def recurse(sub_ps: PointSet, sub_eps: Fraction) -> Net:
        child = Instance(
            sub_ps,
            RestrictionGraph.complete(len(sub_ps)),
            Fraction(sub_eps),
            Fraction(1),
            inst.depth + 1,
            derive_seed(inst.seed, 0, inst.depth + 1, next(counter)),
        )
        return build_weak_net(child, cfg, trace, parent)

    return recurse


def _restricted_recursion(
    inst: Instance, cfg: ImprovedConfig, trace: Optional[RecursionTrace], parent: Optional[int]
) -> Callable[[RestrictionGraph], Net]:
    """Builder for the Stage-1 sub-instance on a subset of the edges, sigma halved."""

    def recurse(pi: RestrictionGraph) -> Net:
        child = Instance(
            inst.ps,
            pi,
            inst.eps,
            inst.sigma / 2,
            inst.depth + 1,
            derive_seed(inst.seed, 1, inst.depth + 1),
        )
        return build_weak_net(child, cfg, trace, parent)

    return recurse


def _clamped(inst: Instance, stage: str) -> Net:
    log = LOGGER.warning if inst.depth == 0 else LOGGER.debug
    log("Net reached n=%s points after %s; clamping to P", len(inst.ps), stage)
    return trivial_net(inst.ps).retagged(Provenance.CLAMP)


def _run_stages(
    inst: Instance, cfg: ImprovedConfig, trace: Optional[RecursionTrace], index: Optional[int]
) -> Net:
    ps, n = inst.ps, len(inst.ps)
    params = derive_params(inst.eps, inst.sigma, cfg, inst.seed)
    recurse = _crowded_recursion(inst, cfg, trace, index)

    q0, slabs_r0 = stage0(inst, params, recurse)
    assembled = q0
    if len(assembled) >= n:
        return _clamped(inst, "stage 0")

    sigma = build_sigma(inst, params, slabs_r0, cfg.max_attempts)

    q1, remaining = stage1(inst, params, sigma.sigma, _restricted_recursion(inst, cfg, trace, index))
    assembled = Net.merge(assembled, q1)
    if len(assembled) >= n:
        return _clamped(inst, "stage 1")

    q2 = stage2(params, slabs_r0, sigma.sample_lines, sigma.sigma, ps)
    assembled = Net.merge(assembled, q2)
    if len(assembled) >= n:
        return _clamped(inst, "stage 2")

    q3 = stage3(inst, params, slabs_r0, sigma.slabs_s0, sigma.sigma, recurse, cfg.max_attempts)
    assembled = Net.merge(assembled, q3)
    if len(assembled) >= n:
        return _clamped(inst, "stage 3")

    LOGGER.debug(
        "Stages at depth %s: |Q0|=%s |Q1|=%s |Q2|=%s |Q3|=%s, %s edges kept",
        inst.depth,
        len(q0),
        len(q1),
        len(q2),
        len(q3),
        len(remaining),
    )
    return assembled


def build_weak_net(
    inst: Instance,
    cfg: Optional[ImprovedConfig] = None,
    trace: Optional[RecursionTrace] = None,
    parent: Optional[int] = None,
) -> Net:
    """
    Weak eps-net of a restricted instance.

    Parameters
    ----------
    inst : Instance
        The instance; top-level callers pass all edges of P and sigma = 1.
    cfg : ImprovedConfig, optional
        Schedule exponent, base threshold, constants and attempt budget.
    trace : RecursionTrace, optional
        Collects one record per call.
    parent : int, optional
        Index in ``trace`` of the calling instance.

    Returns
    -------
    Net
        The quadratic net when eps >= eps_tilde or at the depth cap, all of
        P when ceil(eps*n) <= 1, the sparse-case net when the density is at
        most eps, and otherwise the union of the four stage nets. A stage
        or base-case net of n or more points is replaced by P, tagged Clamp.

    Raises
    ------
    CuttingNotFound, NetNotFound
        When a sampled component fails to verify.
    """
    cfg = cfg if cfg is not None else ImprovedConfig()
    route = choose_route(inst, cfg)
    record = trace.record(inst, route, parent) if trace is not None else None
    index = record.index if record is not None else None

    if route is Route.QUADRATIC:
        net = quadratic_net(inst.ps, inst.eps)
    elif route is Route.TRIVIAL:
        net = trivial_net(inst.ps)
    elif route is Route.SPARSE:
        params = derive_params(inst.eps, inst.sigma, cfg, inst.seed)
        net = sparse_case_net(inst, params.r_sparse, _crowded_recursion(inst, cfg, trace, index))
    elif route is Route.DEPTH_CAP:
        LOGGER.warning(
            "Depth cap %s reached (n=%s, eps=%s); using the quadratic net",
            cfg.constants.depth_cap,
            len(inst.ps),
            inst.eps,
        )
        net = quadratic_net(inst.ps, inst.eps)
    else:
        net = _run_stages(inst, cfg, trace, index)

    if len(net) >= len(inst.ps):
        net = _clamped(inst, route.value)

    if record is not None:
        record.net_size = len(net)
        record.clamped = Provenance.CLAMP in net.tags()

    if inst.depth == 0:
        LOGGER.info(
            "Built weak net for n=%s eps=%s via %s: %s points",
            len(inst.ps),
            inst.eps,
            route.value,
            len(net),
        )
    return net


def improved_net(
    ps: PointSet,
    eps: Fraction,
    cfg: Optional[ImprovedConfig] = None,
    trace: Optional[RecursionTrace] = None,
) -> Net:
    """Weak eps-net of P by the improved construction, starting from the full edge set."""
    cfg = cfg if cfg is not None else ImprovedConfig()
    return build_weak_net(Instance.top_level(ps, Fraction(eps), cfg.seed), cfg, trace)


def top_level_decomposition(
    ps: PointSet, eps: Fraction, cfg: Optional[ImprovedConfig] = None
) -> Trapezoidation:
    """The refined decomposition Sigma the stages of the top-level instance would use."""
    cfg = cfg if cfg is not None else ImprovedConfig()
    inst = Instance.top_level(ps, Fraction(eps), cfg.seed)
    params = derive_params(inst.eps, inst.sigma, cfg, inst.seed)
    slabs_r0 = build_slabs(inst.ps, params.r0)
    return build_sigma(inst, params, slabs_r0, cfg.max_attempts).sigma
