import csv

import numpy as np
import pytest

from selinv import cli, mmio
from selinv.pattern import SymmetricSparseMatrix
from selinv.verify import PropertyResult

SHIPPED = ["twobytwo", "identity", "loop6", "chain", "loopy20"]


def run(*argv):
    return cli.main([str(a) for a in argv])


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_solve_two_by_two(tmp_path, fixtures_dir):
    assert run("solve", "--input", fixtures_dir / "twobytwo.fg", "--output-dir", tmp_path,
               "--no-plot") == 0
    x, inv = cli.read_solution(tmp_path)
    np.testing.assert_allclose(x, [0.375, -0.25], rtol=1e-15)
    dense = np.linalg.inv([[4.0, 2.0], [2.0, 3.0]])
    assert inv[(2, 1)] == pytest.approx(dense[1, 0], rel=1e-15)
    stats = {r["key"]: r["value"] for r in read_csv(tmp_path / "stats.csv")}
    assert stats["L_size"] == "3" and stats["fill_in"] == "0"
    assert (tmp_path / "marginals.csv").exists()


def test_solve_matrix_market_with_random_order(tmp_path, fixtures_dir):
    assert run("solve", "--input", fixtures_dir / "loopy20_A.mtx",
               "--rhs", fixtures_dir / "loopy20_b.mtx", "--order", "random", "--seed", 5,
               "--output-dir", tmp_path) == 0
    a = mmio.read_matrix(fixtures_dir / "loopy20_A.mtx").to_dense()
    b = mmio.read_vector(fixtures_dir / "loopy20_b.mtx")
    x, inv = cli.read_solution(tmp_path)
    np.testing.assert_allclose(x, np.linalg.solve(a, b), rtol=1e-9)
    dense = np.linalg.inv(a)
    for (i, j), v in inv.items():
        assert v == pytest.approx(dense[i - 1, j - 1], rel=1e-9, abs=1e-13)
    assert (tmp_path / "pattern.png").exists()


def test_identity_fixture_inverse(tmp_path, fixtures_dir):
    assert run("solve", "--input", fixtures_dir / "identity.fg", "--output-dir", tmp_path,
               "--no-plot") == 0
    rows = read_csv(tmp_path / "inverse.csv")
    assert [(int(r["i"]), int(r["j"]), float(r["value"])) for r in rows] == \
        [(i, i, 1.0) for i in range(1, 5)]


def test_explicit_order_file(tmp_path, fixtures_dir):
    (tmp_path / "order.txt").write_text("6 5 4 3 2 1\n")
    assert run("solve", "--input", fixtures_dir / "loop6.fg", "--order", "explicit",
               "--order-file", tmp_path / "order.txt", "--output-dir", tmp_path / "o",
               "--no-plot") == 0
    stats = {r["key"]: r["value"] for r in read_csv(tmp_path / "o" / "stats.csv")}
    assert stats["order"] == "6 5 4 3 2 1"


@pytest.mark.parametrize("name", SHIPPED)
@pytest.mark.parametrize("order", ["identity", "tree", "random"])
def test_solve_and_simulate_agree(tmp_path, fixtures_dir, name, order):
    fg_path = fixtures_dir / f"{name}.fg"
    common = ["--input", fg_path, "--order", order, "--seed", 3, "--no-plot"]
    assert run("solve", *common, "--output-dir", tmp_path / "s") == 0
    assert run("simulate", *common, "--output-dir", tmp_path / "m") == 0
    xs, ys = cli.read_solution(tmp_path / "s")
    xm, ym = cli.read_solution(tmp_path / "m")
    np.testing.assert_allclose(xm, xs, rtol=1e-9, atol=1e-12)
    assert ys.keys() == ym.keys()
    for k in ys:
        assert ym[k] == pytest.approx(ys[k], rel=1e-9, abs=1e-12)


def test_simulate_writes_trace_and_checks_bound(tmp_path, fixtures_dir):
    assert run("simulate", "--input", fixtures_dir / "loop6.fg", "--output-dir", tmp_path,
               "--message-log") == 0
    trace = read_csv(tmp_path / "trace.csv")
    summary = {r["key"]: r["value"] for r in read_csv(tmp_path / "summary.csv")}
    assert summary["within_bound"] == "True"
    assert int(summary["rounds"]) == len(trace) - 1
    assert float(trace[-1]["err_y"]) <= 1e-13
    assert (tmp_path / "convergence.png").exists()
    assert (tmp_path / "messages.csv").exists()


def test_simulate_single_variable(tmp_path):
    mmio.write_matrix(tmp_path / "a.mtx", SymmetricSparseMatrix.from_dense(np.array([[2.0]])))
    mmio.write_vector(tmp_path / "b.mtx", [4.0])
    assert run("simulate", "--input", tmp_path / "a.mtx", "--rhs", tmp_path / "b.mtx",
               "--output-dir", tmp_path / "o", "--no-plot") == 0
    summary = {r["key"]: r["value"] for r in read_csv(tmp_path / "o" / "summary.csv")}
    assert int(summary["last_change_round"]) <= 2


def test_async_seeds_share_fixed_point(tmp_path, fixtures_dir):
    finals = []
    for seed in range(1, 11):
        out = tmp_path / str(seed)
        assert run("simulate", "--input", fixtures_dir / "loop6.fg", "--scheduler", "async",
                   "--seed", seed, "--output-dir", out, "--no-plot") == 0
        finals.append(cli.read_solution(out))
    x0, y0 = finals[0]
    for x, y in finals[1:]:
        np.testing.assert_allclose(x, x0, rtol=0, atol=1e-12)
        assert all(abs(y[k] - y0[k]) <= 1e-12 for k in y0)


def test_simulate_budget_exhaustion_exit_code(tmp_path, fixtures_dir):
    code = run("simulate", "--input", fixtures_dir / "loop6.fg", "--max-rounds", 2,
               "--output-dir", tmp_path, "--no-plot")
    assert code == cli.EXIT_NUMERICAL
    assert (tmp_path / "trace.csv").exists()


def test_fillin_chain(tmp_path):
    assert run("fillin-experiment", "--topology", "chain", "--n", 20, "--trials", 300,
               "--seed", 1, "--output-dir", tmp_path) == 0
    trials = read_csv(tmp_path / "trials.csv")
    assert trials[0]["fill_count"] == "0"
    assert len(trials) == 301
    hist = read_csv(tmp_path / "histogram.csv")
    assert sum(int(r["count"]) for r in hist) == 301
    assert sum(float(r["frequency"]) for r in hist) == pytest.approx(1.0)
    assert max(int(r["fill_count"]) for r in hist) <= 18
    assert (tmp_path / "histogram.png").exists()


def test_fillin_two_chain_always_zero(tmp_path):
    assert run("fillin-experiment", "--topology", "chain", "--n", 2, "--trials", 50,
               "--output-dir", tmp_path, "--no-plot") == 0
    assert [r["fill_count"] for r in read_csv(tmp_path / "histogram.csv")] == ["0"]


def test_verify_passes(tmp_path, capsys):
    assert run("verify", "--n-max", 5, "--cases", 10, "--output-dir", tmp_path) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS" in out
    rows = read_csv(tmp_path / "verify.csv")
    assert all(r["passed"] == "True" for r in rows)
    assert (tmp_path / "secondary_structure.png").exists()


def test_verify_failure_exit_code(monkeypatch, capsys):
    bad = PropertyResult("broken")
    bad.record(False, 1.0, "case 0")
    monkeypatch.setattr(cli.verify, "run_suite", lambda *a: [bad])
    assert run("verify") == cli.EXIT_VERIFY
    assert "case 0" in capsys.readouterr().out


def test_verify_rejects_large_n():
    assert run("verify", "--n-max", 13) == cli.EXIT_INVALID


def test_invalid_input_exit_codes(tmp_path, fixtures_dir):
    assert run("solve", "--input", tmp_path / "missing.fg", "--output-dir", tmp_path) == 2
    assert run("solve", "--input", fixtures_dir / "twobytwo_A.mtx",
               "--output-dir", tmp_path) == 2
    (tmp_path / "bad.fg").write_text("VARS 2\nFACTOR 1 SCOPE 3\n1\n1\n")
    assert run("solve", "--input", tmp_path / "bad.fg", "--output-dir", tmp_path) == 2
    assert run("solve", "--input", fixtures_dir / "loop6.fg", "--order", "explicit",
               "--output-dir", tmp_path) == 2


def test_not_positive_definite_exit_code(tmp_path, capsys):
    (tmp_path / "npd.fg").write_text(
        "VARS 2\nFACTOR 1 SCOPE 1 2\n1 1\n1 1\n0 0\n")
    assert run("solve", "--input", tmp_path / "npd.fg", "--output-dir", tmp_path,
               "--no-plot") == cli.EXIT_NUMERICAL
    assert "not positive definite" in capsys.readouterr().err


def test_gen_writes_fixture_files(tmp_path):
    assert run("gen", "--topology", "loopy", "--n", 12, "--seed", 4, "--output-dir", tmp_path,
               "--name", "demo") == 0
    for suffix in (".fg", "_A.mtx", "_b.mtx", "_pattern.png"):
        assert (tmp_path / f"demo{suffix}").exists()


def test_shipped_fixtures_match_generator(tmp_path, fixtures_dir):
    for name in SHIPPED:
        run("gen", "--topology", name, "--output-dir", tmp_path, "--no-plot")
        assert (tmp_path / f"{name}.fg").read_text() == (fixtures_dir / f"{name}.fg").read_text()


def test_commands_are_deterministic(tmp_path, fixtures_dir):
    for k in (1, 2):
        run("simulate", "--input", fixtures_dir / "loopy20.fg", "--scheduler", "async",
            "--seed", 8, "--output-dir", tmp_path / str(k), "--no-plot")
    for f in ("trace.csv", "x.csv", "inverse.csv"):
        assert (tmp_path / "1" / f).read_text() == (tmp_path / "2" / f).read_text()
