import asyncio

from fractions import Fraction

import pytest

from epsnet.bench.generators import GENERATORS, generate_points
from epsnet.bench.io import (
    BENCH_COLUMNS,
    BenchRecord,
    format_decimal,
    format_points,
    net_from_document,
    net_to_document,
    parse_points,
    read_bench_csv,
    read_net,
    write_bench_csv,
    write_net,
)
from epsnet.bench.render import render_svg
from epsnet.bench import runner
from epsnet.bench.runner import ALGORITHMS, BenchConfig, build_net, run_bench, run_row, size_slopes
from epsnet.errors import InvalidParameter
from epsnet.nets.baseline import quadratic_size_bound
from epsnet.nets.geometry import Point, convex_hull, is_general_position
from epsnet.nets.improved import top_level_decomposition
from epsnet.nets.net import Net, Provenance
from epsnet.nets.params import ImprovedConfig


@pytest.mark.parametrize("kind", sorted(GENERATORS))
def test_generators_give_certified_points(kind):
    ps = generate_points(kind, 16, 3)

    assert len(ps) == 16
    assert ps.general_position
    assert is_general_position(ps.points)
    assert generate_points(kind, 16, 3) == ps


def test_convex_points_are_in_convex_position():
    assert len(convex_hull(generate_points("convex", 12, 1).points)) == 12


def test_grid_points_stay_near_the_grid():
    ps = generate_points("grid", 16, 5)
    for k, p in enumerate(ps):
        assert abs(p.x - Fraction(k % 4, 4)) < Fraction(1, 2**30)
        assert abs(p.y - Fraction(k // 4, 4)) < Fraction(1, 2**30)


def test_generator_rejections():
    with pytest.raises(InvalidParameter):
        generate_points("spiral", 10, 1)
    with pytest.raises(InvalidParameter):
        generate_points("uniform", 0, 1)


def test_points_text_format():
    ps = parse_points("# three points\n0 0\n\n1/2 0.25  # inline\n3 -1\n")

    assert ps.points == (Point.of(0, 0), Point.of(Fraction(1, 2), Fraction(1, 4)), Point.of(3, -1))
    assert format_points(ps) == "0 0\n1/2 1/4\n3 -1\n"

    with pytest.raises(InvalidParameter):
        parse_points("1 2 3\n")
    with pytest.raises(InvalidParameter):
        parse_points("1 x\n")


def test_format_decimal():
    assert format_decimal(Fraction(2, 5)) == "0.4"
    assert format_decimal(Fraction(1)) == "1.0"
    assert format_decimal(Fraction(1, 3)) == "0.333333"


def test_net_document(tmp_path, uniform24):
    net = Net.merge(
        Net.tagged(uniform24.points[:2], Provenance.STAGE0),
        Net.tagged([Point.of(Fraction(1, 3), Fraction(2, 7))], Provenance.STAGE2),
    )
    document = net_to_document(net, Fraction(1, 4), "improved", {"eta": Fraction(1, 10)})

    assert document["epsilon"] == "1/4"
    assert document["size"] == 3
    assert document["points"][2] == {"x": "1/3", "y": "2/7", "stage": "Stage2"}
    assert document["params"] == {"eta": "1/10"}

    path = tmp_path / "net.json"
    write_net(document, path)
    assert read_net(path) == (net, Fraction(1, 4), "improved")


def test_malformed_net_documents():
    with pytest.raises(InvalidParameter):
        net_from_document({"epsilon": "1/4", "algorithm": "improved"})
    with pytest.raises(InvalidParameter):
        net_from_document(
            {"epsilon": "1/4", "algorithm": "x", "points": [{"x": "0", "y": "0", "stage": "Nope"}]}
        )
    with pytest.raises(InvalidParameter):
        net_from_document({"epsilon": "1/4", "algorithm": "x", "points": [], "size": 2})


def test_bench_record_consistency():
    with pytest.raises(ValueError):
        BenchRecord(24, "0.25", "trivial", 1, 24, 6, 6, True, 1.0, 1.0)

    failed = BenchRecord(24, "0.25", "improved", 1, 0, 0, 6, False, 0.0, 0.0, "uniform", "NetNotFound: x")
    assert failed.error


def test_build_net_rejects_unknown_algorithms(uniform24):
    with pytest.raises(InvalidParameter):
        build_net("optimal", uniform24, Fraction(1, 4))


def test_bench_config_rejections():
    with pytest.raises(InvalidParameter):
        BenchConfig(algorithms=("optimal",))
    with pytest.raises(InvalidParameter):
        BenchConfig(generators=("spiral",))
    with pytest.raises(InvalidParameter):
        BenchConfig(eps_values=(Fraction(0),))
    with pytest.raises(InvalidParameter):
        BenchConfig(concurrency=0)


def test_run_row_on_a_tiny_grid():
    record = run_row("trivial", Fraction(1, 4), 3, 1, "grid", ImprovedConfig())
    assert record.error == ""
    assert record.is_net
    assert record.unclamped_size == record.net_size == 3


def test_run_row_clamps_oversized_nets_to_p(monkeypatch):
    extra = [Point.of(1000 + k, -1000) for k in range(5)]

    def oversized(ps, eps, cfg):
        return Net.tagged(list(ps.points) + extra, Provenance.QUAD_LINE)

    monkeypatch.setitem(runner.ALGORITHMS, "quadratic", oversized)
    record = run_row("quadratic", Fraction(1, 4), 12, 1, "uniform", ImprovedConfig())

    assert record.error == ""
    assert record.unclamped_size == 17
    assert record.net_size == 12
    assert record.is_net


def test_run_row_keeps_quadratic_rows_within_n():
    record = run_row("quadratic", Fraction(3, 20), 40, 1, "uniform", ImprovedConfig())

    assert record.error == ""
    assert record.is_net
    assert record.net_size <= 40 < record.unclamped_size
    assert record.unclamped_size <= quadratic_size_bound(Fraction(3, 20))


def test_rubin_is_an_alias_of_improved(uniform24):
    assert ALGORITHMS["rubin"] is ALGORITHMS["improved"]
    assert BenchConfig().algorithms == ("trivial", "quadratic", "improved")

    cfg = ImprovedConfig(seed=5)
    eps = Fraction(1, 4)
    assert build_net("rubin", uniform24, eps, cfg) == build_net("improved", uniform24, eps, cfg)

    record = run_row("rubin", Fraction(2, 5), 24, 1, "uniform", ImprovedConfig())
    assert record.algorithm == "rubin"
    assert record.is_net and not record.error


def test_bench_sweep(tmp_path):
    config = BenchConfig(
        algorithms=("trivial", "quadratic"),
        eps_values=(Fraction(2, 5), Fraction(1, 4), Fraction(3, 20)),
        ns=(24,),
        seeds=(1, 2),
        concurrency=3,
    )
    path = tmp_path / "bench.csv"
    records = asyncio.run(run_bench(config, path))

    assert len(records) == 12
    assert [(r.algorithm, r.eps, r.seed) for r in records] == [
        (a, format_decimal(e), s) for a, e, _, s, _ in config.rows()
    ]
    assert all(r.is_net and not r.error for r in records)
    assert all(r.net_size == 24 for r in records if r.algorithm == "trivial")
    assert all(r.net_size <= r.n <= r.unclamped_size or r.net_size == r.unclamped_size for r in records)

    assert path.read_text().splitlines()[0] == ",".join(BENCH_COLUMNS)
    assert read_bench_csv(path) == records

    slopes = size_slopes(records)
    assert abs(slopes["trivial"]) < 1e-9
    assert "quadratic" in slopes


def test_size_slopes_skip_single_eps():
    record = BenchRecord(24, "0.25", "trivial", 1, 24, 5, 6, True, 1.0, 1.0, "uniform")
    assert size_slopes([record]) == {}


def test_read_bench_csv_checks_the_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("n,eps\n24,0.25\n")
    with pytest.raises(InvalidParameter):
        read_bench_csv(path)


def test_empty_csv_round_trip(tmp_path):
    path = tmp_path / "empty.csv"
    write_bench_csv([], path)
    assert read_bench_csv(path) == []


def test_render_svg(tmp_path, uniform24):
    net = Net.merge(
        Net.tagged(uniform24.points[:3], Provenance.STAGE0),
        Net.tagged(uniform24.points[3:5], Provenance.STAGE2),
        Net.tagged(uniform24.points[5:6], Provenance.STAGE3_TRIANGLE),
    )
    decomposition = top_level_decomposition(uniform24, Fraction(1, 4), ImprovedConfig(seed=2))

    first = render_svg(uniform24, net, decomposition, tmp_path / "a.svg")
    second = render_svg(uniform24, net, decomposition, tmp_path / "b.svg")
    text = first.read_text()

    assert text.count("<circle") == 24
    assert text.count("<rect") == 6
    for tag in ("Stage0", "Stage2", "Stage3-Triangle"):
        assert f'id="net-{tag}"' in text
    assert 'id="decomposition"' in text
    assert "<polygon" in text
    assert first.read_bytes() == second.read_bytes()


def test_render_points_only(tmp_path):
    ps = generate_points("convex", 7, 2)
    text = render_svg(ps, None, None, tmp_path / "p.svg").read_text()

    assert text.count("<circle") == 7
    assert "net-" not in text
    assert "decomposition" not in text


@pytest.mark.slow
def test_acceptance_sweep():
    config = BenchConfig(
        algorithms=("trivial", "quadratic", "improved"),
        eps_values=(Fraction(2, 5), Fraction(1, 4), Fraction(3, 20)),
        ns=(24, 40, 64),
        seeds=(1, 2, 3),
        generators=tuple(sorted(GENERATORS)),
    )
    records = asyncio.run(run_bench(config))

    assert len(records) == 324
    assert all(r.is_net and not r.error for r in records)
    assert all(r.net_size <= r.n for r in records)
    assert all(r.unclamped_size <= r.n for r in records if r.algorithm != "quadratic")
    assert all(
        r.unclamped_size <= quadratic_size_bound(Fraction(r.eps)) for r in records if r.algorithm == "quadratic"
    )


@pytest.mark.slow
def test_size_trend_at_64_points(tmp_path):
    config = BenchConfig(
        eps_values=(Fraction(2, 5), Fraction(3, 10), Fraction(1, 5), Fraction(3, 20)),
        ns=(64,),
    )
    path = tmp_path / "trend.csv"
    records = asyncio.run(run_bench(config, path))

    assert read_bench_csv(path) == records
    assert len(records) == 12
    assert all(0 < r.net_size <= 64 for r in records)
    assert all(r.net_size <= r.unclamped_size for r in records)
    assert all(
        r.unclamped_size <= quadratic_size_bound(Fraction(r.eps)) for r in records if r.algorithm == "quadratic"
    )
    assert set(size_slopes(records)) == {"trivial", "quadratic", "improved"}
