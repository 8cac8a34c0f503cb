import asyncio
import json

from fractions import Fraction

import pytest

from epsnet.__main__ import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from epsnet.bench.io import net_to_document, read_bench_csv, read_net, read_points, write_net
from epsnet.nets.net import Net


def run(*argv):
    return asyncio.run(main([str(a) for a in argv]))


@pytest.fixture
def points_file(tmp_path):
    path = tmp_path / "points.txt"
    assert run("gen", "--kind", "uniform", "--n", 20, "--seed", 3, "--out", path) == EXIT_OK
    return path


def test_no_verb_prints_help(capsys):
    assert run() == EXIT_USAGE
    assert "usage: epsnet" in capsys.readouterr().out


def test_gen_to_stdout(capsys):
    assert run("gen", "--kind", "grid", "--n", 9, "--seed", 1) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 9


def test_gen_file_reads_back(points_file):
    assert len(read_points(points_file)) == 20


@pytest.mark.parametrize("algo", ["trivial", "quadratic", "improved", "rubin"])
def test_build_writes_a_verified_net(tmp_path, points_file, algo):
    out = tmp_path / f"{algo}.json"
    assert run("build", "--points", points_file, "--eps", "1/4", "--algo", algo, "--out", out) == EXIT_OK

    net, eps, algorithm = read_net(out)
    assert (eps, algorithm) == (Fraction(1, 4), algo)
    assert 0 < len(net) <= 20
    assert run("verify", "--points", points_file, "--net", out) == EXIT_OK


def test_build_to_stdout_with_svg(tmp_path, points_file, capsys):
    svg = tmp_path / "net.svg"
    assert run("build", "--points", points_file, "--eps", "0.4", "--algo", "quadratic", "--svg", svg) == EXIT_OK

    document = json.loads(capsys.readouterr().out)
    assert document["epsilon"] == "2/5"
    assert document["params"]["n"] == "20"
    assert svg.read_text().count("<circle") == 20


def test_build_records_improved_parameters(tmp_path, points_file):
    out = tmp_path / "net.json"
    constants = tmp_path / "constants.cfg"
    constants.write_text("C0=1/10\ndepth_cap=3\n")

    code = run(
        "build", "--points", points_file, "--eps", "1/3", "--eta", "1/20",
        "--constants", constants, "--no-verify", "--out", out,
    )
    assert code == EXIT_OK
    assert json.loads(out.read_text())["params"]["eta"] == "1/20"


def test_verify_rejects_an_empty_net(tmp_path, points_file):
    path = tmp_path / "empty.json"
    write_net(net_to_document(Net(), Fraction(1, 4), "handmade", {}), path)

    assert run("verify", "--points", points_file, "--net", path) == EXIT_FAILED
    assert run("verify", "--points", points_file, "--net", path, "--eps", "21/20") == EXIT_OK


def test_bench_writes_the_csv(tmp_path):
    csv = tmp_path / "bench.csv"
    code = run(
        "bench", "--algo", "trivial", "quadratic", "--eps", "2/5", "1/4",
        "--n", 16, "--seed", 1, 2, "--concurrency", 2, "--csv", csv,
    )

    assert code == EXIT_OK
    assert len(read_bench_csv(csv)) == 8


def test_render_with_decomposition(tmp_path, points_file):
    out = tmp_path / "net.json"
    svg = tmp_path / "render.svg"
    assert run("build", "--points", points_file, "--eps", "1/4", "--algo", "trivial", "--out", out) == EXIT_OK

    assert run("render", "--points", points_file, "--net", out, "--svg", svg, "--decomposition", "--eps", "1/4") == EXIT_OK
    text = svg.read_text()
    assert 'id="decomposition"' in text
    assert 'id="net-Trivial"' in text


def test_render_decomposition_needs_eps(tmp_path, points_file):
    assert run("render", "--points", points_file, "--svg", tmp_path / "x.svg", "--decomposition") == EXIT_USAGE


def test_invalid_parameters_exit_with_usage(tmp_path, points_file):
    assert run("build", "--points", points_file, "--eps", "0", "--no-verify") == EXIT_USAGE
    assert run("build", "--points", points_file, "--eps", "1/4", "--eta", "1/2") == EXIT_USAGE
    assert run("gen", "--n", 0) == EXIT_USAGE


def test_duplicate_points_exit_with_usage(tmp_path):
    path = tmp_path / "twice.txt"
    path.write_text("0 0\n3 1\n1 4\n3 1\n")

    assert run("build", "--points", path, "--eps", "1/4", "--algo", "trivial") == EXIT_USAGE
    assert run("render", "--points", path, "--svg", tmp_path / "twice.svg") == EXIT_USAGE


def test_missing_and_oversized_inputs(tmp_path):
    assert run("build", "--points", tmp_path / "missing.txt", "--eps", "1/4") == EXIT_USAGE

    big = tmp_path / "big.txt"
    assert run("gen", "--n", 100, "--out", big) == EXIT_OK
    assert run("build", "--points", big, "--eps", "1/4", "--algo", "trivial") == EXIT_USAGE


def test_malformed_rationals_are_argparse_errors():
    with pytest.raises(SystemExit) as exc:
        run("build", "--points", "p.txt", "--eps", "one")
    assert exc.value.code == 2


def test_build_and_render_are_byte_identical(tmp_path, points_file):
    outputs = []
    for tag in ("a", "b"):
        out, svg = tmp_path / f"{tag}.json", tmp_path / f"{tag}.svg"
        code = run(
            "build", "--points", points_file, "--eps", "1/4", "--seed", 9,
            "--out", out, "--svg", svg, "--no-verify",
        )
        assert code == EXIT_OK
        outputs.append((out.read_bytes(), svg.read_bytes()))

    assert outputs[0] == outputs[1]
