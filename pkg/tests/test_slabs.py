from fractions import Fraction

import numpy as np
import pytest

from epsnet.bench.generators import generate_points
from epsnet.errors import InvalidParameter, TooFewPoints
from epsnet.nets.geometry import Line, Point, PointSet, segment_line_crossing
from epsnet.nets.net import Net, Provenance
from epsnet.nets.slabs import build_slabs, crowded_net, line_crossing_net, refine_slabs


def on_parabola(n):
    return PointSet.of([(x, x * x) for x in range(1, n + 1)], general_position=True)


def test_even_slabs():
    slabs = build_slabs(on_parabola(10), 4)

    assert slabs.r == 4
    assert [len(s.points) for s in slabs.slabs] == [2, 2, 2, 2, 2]
    assert slabs.abscissas == [Fraction(5, 2), Fraction(9, 2), Fraction(13, 2), Fraction(17, 2)]


def test_near_even_slabs():
    slabs = build_slabs(on_parabola(10), 3)
    counts = [len(s.points) for s in slabs.slabs]

    assert len(counts) == 4
    assert set(counts) <= {2, 3}
    assert sum(counts) == 10


def test_separator_count_clamps_to_n_minus_one():
    slabs = build_slabs(on_parabola(3), 5)

    assert slabs.r == 2
    assert [len(s.points) for s in slabs.slabs] == [1, 1, 1]


def test_slabs_partition_points():
    ps = generate_points("uniform", 37, 3)
    slabs = build_slabs(ps, 6)

    members = sorted(i for s in slabs.slabs for i in s.points)
    assert members == list(range(37))
    assert not {p.x for p in ps} & set(slabs.abscissas)
    for k, slab in enumerate(slabs.slabs):
        assert all(slab.holds(ps[i].x) and slabs.slab_of(ps[i].x) == k for i in slab.points)


def test_build_slabs_rejects_bad_input():
    with pytest.raises(TooFewPoints):
        build_slabs(PointSet(()), 2)
    with pytest.raises(InvalidParameter):
        build_slabs(on_parabola(4), 0)


def test_refinement_keeps_every_separator():
    ps = generate_points("uniform", 40, 5)
    coarse = build_slabs(ps, 3)
    fine = refine_slabs(coarse, ps, 11)

    assert fine.r >= 11
    assert set(coarse.abscissas) <= set(fine.abscissas)
    for slab in coarse.slabs:
        assert len(fine.lines_inside(slab)) >= 2


def test_refinement_below_current_count_is_identity():
    ps = on_parabola(10)
    coarse = build_slabs(ps, 4)
    assert refine_slabs(coarse, ps, 3) is coarse


def horizontal_segments(count):
    return [(Point.of(-1, y), Point.of(1, y)) for y in range(count, 0, -1)]


def test_every_third_crossing():
    net = line_crossing_net(Line.vertical(0), horizontal_segments(10), 3)
    assert [p.y for p in net.picks] == [3, 6, 9]
    assert all(p.x == 0 for p in net.picks)


@pytest.mark.parametrize("step", [1, 2, 5, 7])
def test_picks_leave_step_minus_one_crossings_between(step):
    rng = np.random.default_rng(step)
    crossing = [(Point.of(-1, k), Point.of(1, k + Fraction(int(rng.integers(0, 100)), 100))) for k in range(23)]
    missing = [(Point.of(1, k), Point.of(2, k)) for k in range(5)]
    segments = [*crossing, *missing]
    segments = [segments[int(k)] for k in rng.permutation(len(segments))]

    line = Line.vertical(0)
    ys = sorted(segment_line_crossing(p, q, line).y for p, q in crossing)
    picks = [p.y for p in line_crossing_net(line, segments, step).picks]

    assert len(picks) == len(ys) // step
    assert sum(y < picks[0] for y in ys) == step - 1
    for low, high in zip(picks, picks[1:]):
        assert sum(low < y < high for y in ys) == step - 1
    assert sum(y > picks[-1] for y in ys) < step


@pytest.mark.parametrize("step, expected", [(0, 0), (1, 10), (11, 0)])
def test_crossing_step_edge_cases(step, expected):
    assert len(line_crossing_net(Line.vertical(0), horizontal_segments(10), step).picks) == expected


def test_crossing_net_needs_a_vertical_line():
    with pytest.raises(InvalidParameter):
        line_crossing_net(Line.horizontal(0), horizontal_segments(2), 1)
    with pytest.raises(InvalidParameter):
        line_crossing_net(Line.vertical(0), horizontal_segments(2), -1)


def single_point(ps, eps):
    return Net.tagged(ps.points[:1], Provenance.TRIVIAL)


def test_crowded_net_base_case_per_slab():
    calls = []

    def recurse(sub, eps):
        calls.append((len(sub), eps))
        return single_point(sub, eps)

    net = crowded_net(on_parabola(10), 4, Fraction(1, 5), recurse)

    assert calls == [(2, Fraction(1))] * 5
    assert len(net) == 5
    assert net.tags() == {Provenance.STAGE0}


def test_crowded_net_takes_all_points_when_slabs_are_tiny():
    net = crowded_net(on_parabola(6), 3, Fraction(1, 5), single_point, Provenance.STAGE3_QS0)
    assert len(net) == 6
    assert net.tags() == {Provenance.STAGE3_QS0}


def test_crowded_net_rejects_zero_fraction():
    with pytest.raises(InvalidParameter):
        crowded_net(on_parabola(10), 4, Fraction(0), single_point)
