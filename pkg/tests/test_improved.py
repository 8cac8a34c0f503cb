import itertools

from fractions import Fraction

import pytest

from epsnet.bench.generators import generate_points
from epsnet.errors import InvalidParameter
from epsnet.nets.arrangement import build_trapezoidation, zone_of_line
from epsnet.nets.common import log_factor
from epsnet.nets.geometry import Line, PointSet
from epsnet.nets.improved import (
    Instance,
    RecursionTrace,
    RestrictionGraph,
    Route,
    build_rich_graph,
    build_sigma,
    build_weak_net,
    choose_route,
    improved_net,
    sector_partition,
    sparse_case_net,
    stage0,
    stage1,
    stage2,
    stage3,
    top_level_decomposition,
)
from epsnet.nets.net import Net, Provenance
from epsnet.nets.params import ImprovedConfig, NetConstants, derive_params
from epsnet.nets.slabs import build_slabs
from epsnet.nets.verifier import find_restricted_violation, is_weak_eps_net


def on_parabola(n):
    return PointSet.of([(x, x * x) for x in range(1, n + 1)], general_position=True)


def first_point(ps, eps):
    return Net.tagged(ps.points[:1], Provenance.TRIVIAL)


@pytest.fixture
def staged(uniform24):
    """The top-level instance at eps = 1/4 with its schedule and decompositions."""
    inst = Instance.top_level(uniform24, Fraction(1, 4), seed=5)
    cfg = ImprovedConfig()
    params = derive_params(inst.eps, inst.sigma, cfg, inst.seed)
    slabs = build_slabs(inst.ps, params.r0)
    return inst, params, slabs, build_sigma(inst, params, slabs)


def test_restriction_graph():
    graph = RestrictionGraph.of(4, [(1, 0), (0, 1), (2, 3)])

    assert graph.sorted_edges() == [(0, 1), (2, 3)]
    assert graph.has_edge(3, 2)
    assert graph.density == Fraction(2, 6)
    assert len(RestrictionGraph.complete(5)) == 10
    assert graph.without(RestrictionGraph.of(4, [(0, 1)])).sorted_edges() == [(2, 3)]

    with pytest.raises(InvalidParameter):
        RestrictionGraph.of(4, [(1, 1)])
    with pytest.raises(InvalidParameter):
        RestrictionGraph(3, frozenset({(0, 3)}))


def test_instance_validation(uniform24):
    with pytest.raises(InvalidParameter):
        Instance(uniform24, RestrictionGraph.complete(23), Fraction(1, 4))
    with pytest.raises(InvalidParameter):
        Instance(uniform24, RestrictionGraph.complete(24), Fraction(1, 4), sigma=Fraction(0))


def test_routes(uniform24):
    cfg = ImprovedConfig()
    complete = RestrictionGraph.complete(24)

    assert choose_route(Instance(uniform24, complete, Fraction(1)), cfg) is Route.QUADRATIC
    assert choose_route(Instance(uniform24, complete, Fraction(1, 24)), cfg) is Route.TRIVIAL
    assert choose_route(Instance(uniform24, RestrictionGraph(24), Fraction(1, 4)), cfg) is Route.SPARSE
    assert choose_route(Instance(uniform24, complete, Fraction(1, 4)), cfg) is Route.STAGES
    assert choose_route(Instance(uniform24, complete, Fraction(1, 4), depth=12), cfg) is Route.DEPTH_CAP


def test_eps_one_gives_one_point(uniform24):
    assert len(improved_net(uniform24, Fraction(1))) == 1


def test_base_route_with_n_points_is_clamped(uniform24):
    inst = Instance(uniform24, RestrictionGraph.complete(24), Fraction(1, 24))
    trace = RecursionTrace()
    net = build_weak_net(inst, ImprovedConfig(), trace)

    assert trace.calls[0].route is Route.TRIVIAL
    assert trace.calls[0].clamped
    assert net.points == uniform24.points
    assert net.tags() == {Provenance.CLAMP}


def test_sector_blocks_of_a_ten_point_slab():
    ps = generate_points("uniform", 10, 4)
    cells = {i: 0 for i in range(10)}
    partition = sector_partition(ps, 0, range(10), cells, Fraction(1, 10), 10, Fraction(1, 100))

    assert partition.block_size == 2
    assert partition.z == 5
    assert [len(s) for s in partition.sectors] == [6, 6, 5, 5, 5]
    for q in partition.radial_order:
        assert sum(q in s for s in partition.sectors) == 3
    assert all(partition.rich)


def test_few_blocks_give_a_single_sector():
    ps = generate_points("uniform", 10, 4)
    cells = {i: i for i in range(10)}
    partition = sector_partition(ps, 3, range(10), cells, Fraction(1, 4), 10, Fraction(1, 100))

    assert partition.sectors == (partition.radial_order,)
    assert partition.rich == (False,)


def test_rich_graph_extremes():
    ps = generate_points("uniform", 8, 2)

    apart = build_rich_graph(ps, range(8), {i: i for i in range(8)}, Fraction(1, 8), Fraction(1, 2), 8)
    assert len(apart) == 0

    together = build_rich_graph(ps, range(8), {i: 0 for i in range(8)}, Fraction(1), Fraction(1, 2), 8)
    assert len(together) == 28


def test_rich_graph_is_reproducible(staged):
    inst, params, slabs, sigma = staged
    slab = slabs.slabs[0]
    i = params.i_lo

    first = build_rich_graph(inst.ps, slab.points, sigma.sigma.point_to_cell, params.delta(i), params.eps_hat, 24)
    second = build_rich_graph(inst.ps, slab.points, sigma.sigma.point_to_cell, params.delta(i), params.eps_hat, 24)
    assert first == second
    assert all(a in slab.points and b in slab.points for a, b in first.edges)


def test_stage0_single_points_per_slab():
    ps = on_parabola(12)
    inst = Instance.top_level(ps, Fraction(1, 4), seed=1)
    params = derive_params(inst.eps, inst.sigma, ImprovedConfig(constants=NetConstants(c0=Fraction(1, 5))), 1)
    calls = []

    def recurse(sub, eps):
        calls.append(eps)
        return first_point(sub, eps)

    q0, slabs = stage0(inst, params, recurse)

    assert slabs.r == params.r0 == 2
    assert calls == [Fraction(1, 5) * Fraction(1, 4) * 12 / 4] * 3
    assert len(q0) == 3
    assert q0.tags() == {Provenance.STAGE0}


def test_sigma_decomposition(staged):
    inst, params, slabs, sigma = staged

    assert set(slabs.abscissas) <= set(sigma.slabs_s0.abscissas)
    assert all(len(c.contained_points) <= -(-24 // params.r1**2) for c in sigma.sigma.cells)
    assert sigma.cutting.max_crossing <= sigma.cutting.threshold
    assert not any(line.contains(p) for line in sigma.sample_lines for p in inst.ps)


def test_stage1_keeps_only_short_zones(staged):
    inst, params, _, sigma = staged
    seen = []

    def recurse(pi):
        seen.append(pi)
        return Net()

    q1, remaining = stage1(inst, params, sigma.sigma, recurse)

    assert len(q1) == 0
    assert len(seen) == 1
    assert len(seen[0]) + len(remaining) == len(inst.pi)
    for a, b in remaining.edges:
        zone = zone_of_line(sigma.sigma, Line.through(inst.ps[a], inst.ps[b]))
        assert len(zone) <= params.zone_threshold
    for a, b in seen[0].edges:
        assert len(zone_of_line(sigma.sigma, Line.through(inst.ps[a], inst.ps[b]))) > params.zone_threshold


def test_stage1_without_lines_keeps_every_edge():
    ps = generate_points("uniform", 12, 3)
    inst = Instance.top_level(ps, Fraction(1, 4), seed=2)
    params = derive_params(inst.eps, inst.sigma, ImprovedConfig(), 2)
    sigma = build_trapezoidation([], ps)

    q1, remaining = stage1(inst, params, sigma, lambda pi: Net.tagged([], Provenance.STAGE1))
    assert remaining == inst.pi
    assert len(q1) == 0


def test_stage2_size_bound(staged):
    inst, params, slabs, sigma = staged
    q2 = stage2(params, slabs, sigma.sample_lines, sigma.sigma, inst.ps)

    crossings = len(slabs.lines) * len(sigma.sample_lines)
    step = -(-params.constants.c1 * params.eps * 24 // 1)
    per_line = -(-24 * crossings // step)
    assert len(q2) <= len(sigma.sigma.vertices) + crossings + len(slabs.lines) * per_line
    assert q2.tags() <= {Provenance.STAGE2}


def test_stage3_tags(staged):
    inst, params, slabs, sigma = staged
    q3 = stage3(inst, params, slabs, sigma.slabs_s0, sigma.sigma, first_point)

    assert q3.tags() <= {Provenance.STAGE3_QS0, Provenance.STAGE3_TRIANGLE, Provenance.STAGE3_QLI}
    assert Provenance.STAGE3_TRIANGLE in q3.tags()


def test_sparse_case_on_empty_graph_is_the_crowded_net():
    ps = generate_points("uniform", 20, 6)
    inst = Instance(ps, RestrictionGraph(20), Fraction(2, 5))

    net = sparse_case_net(inst, 2, first_point)

    assert len(net) == 3
    assert net.tags() == {Provenance.STAGE1}


def test_sparse_case_rejects_zero_separators(uniform24):
    with pytest.raises(InvalidParameter):
        sparse_case_net(Instance(uniform24, RestrictionGraph(24), Fraction(1, 4)), 0, first_point)


def test_sparse_case_pierces_restricted_sets():
    ps = generate_points("uniform", 12, 9)
    edges = [pair for k, pair in enumerate(itertools.combinations(range(12), 2)) if k % 2 == 0]
    inst = Instance(ps, RestrictionGraph.of(12, edges), Fraction(1, 2), depth=1, seed=4)

    assert choose_route(inst, ImprovedConfig(eps_tilde=Fraction(3, 4))) is Route.SPARSE
    net = build_weak_net(inst, ImprovedConfig(eps_tilde=Fraction(3, 4)))
    assert find_restricted_violation(ps, net.points, inst.pi, inst.eps, inst.sigma) is None


@pytest.mark.parametrize("n, eps, seed", [(24, Fraction(1, 4), 1), (40, Fraction(7, 20), 3), (48, Fraction(3, 10), 11)])
def test_improved_net_is_a_bounded_weak_net(n, eps, seed):
    ps = generate_points("uniform", n, seed)
    trace = RecursionTrace()
    net = improved_net(ps, eps, ImprovedConfig(seed=seed), trace)

    assert len(net) <= n
    assert is_weak_eps_net(ps, net, eps).is_net
    assert trace.calls[0].route is Route.STAGES
    assert trace.max_depth <= ImprovedConfig().constants.depth_cap
    assert trace.stalled() == []


def test_improved_net_is_deterministic(uniform24):
    cfg = ImprovedConfig(seed=8)
    assert improved_net(uniform24, Fraction(1, 4), cfg) == improved_net(uniform24, Fraction(1, 4), cfg)


def test_depth_cap_falls_back_to_the_quadratic_net(uniform24):
    cfg = ImprovedConfig(constants=NetConstants(depth_cap=0))
    trace = RecursionTrace()
    net = improved_net(uniform24, Fraction(1, 4), cfg, trace)

    assert trace.calls[0].route is Route.DEPTH_CAP
    assert len(trace.calls) == 1
    assert is_weak_eps_net(uniform24, net, Fraction(1, 4)).is_net


def test_top_level_decomposition_places_every_point(uniform24):
    sigma = top_level_decomposition(uniform24, Fraction(1, 4), ImprovedConfig(seed=2))
    assert sorted(sigma.point_to_cell) == list(range(24))


def test_stage1_removes_at_most_a_c_over_t_fraction_of_edges(staged):
    inst, params, _, sigma = staged
    zones = [
        len(zone_of_line(sigma.sigma, Line.through(inst.ps[a], inst.ps[b]))) for a, b in inst.pi.sorted_edges()
    ]
    _, remaining = stage1(inst, params, sigma.sigma, lambda pi: Net())

    removed = Fraction(len(inst.pi) - len(remaining), len(inst.pi))
    c = Fraction(sum(zones), len(zones)) / (params.r1 * log_factor(params.r1))
    assert removed <= c / params.t

    # a line enters at most one cell more than the source lines and wall abscissas it crosses
    walls = len(sigma.sigma.wall_abscissas())
    assert max(zones) <= 1 + len(sigma.sigma.source_lines) + walls


def test_rich_graph_size_stays_within_its_bound(staged):
    inst, params, slabs, sigma = staged
    cell_of = sigma.sigma.point_to_cell
    need = max(params.eps_hat * 24 / 10, 1)
    capacity = -(-24 // params.r1**2)

    for slab in slabs.slabs:
        same = {
            p: sum(1 for q in slab.points if q != p and cell_of.get(q) == cell_of.get(p)) for p in slab.points
        }
        for i in params.interval:
            delta = params.delta(i)
            block = max(1, -(-2 * delta * 24 // 1))
            graph = build_rich_graph(inst.ps, slab.points, cell_of, delta, params.eps_hat, 24)

            # each same-cell neighbor sits in at most three sectors of at most three blocks each
            assert len(graph) <= sum(3 * same[p] / need * 3 * block for p in slab.points)
            assert len(graph) <= len(slab.points) * 9 * (capacity - 1) * block / need
