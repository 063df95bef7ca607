import json

import numpy as np
import pytest

from ascpg.cli import main
from ascpg.harness import proximal_gradient
from ascpg.metrics import AggregateSeries, write_aggregate_csv
from ascpg.problems import ProblemSpec, build_baird, save_mdp
from ascpg.prox import Regularizer
from ascpg.solver import RunTrace

MINIMAL = "[problem]\nfamily = identity\nn = 2\nnoise = 0.1\n[solver]\nK = 10\n"


def write(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_run(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", write(tmp_path, MINIMAL), "--out", str(out)]) == 0
    traces = sorted(out.glob("trace_*.csv"))
    assert [t.name for t in traces] == ["trace_ascpg_seed0.csv"]
    assert len(RunTrace.from_csv(traces[0])) == 10
    assert {"aggregate_ascpg.csv", "slope_ascpg.json", "effective.cfg"} <= {p.name for p in out.iterdir()}
    assert "ascpg: slope" in capsys.readouterr().out


def test_default_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ASCPG_OUT", str(tmp_path / "envout"))
    assert main(["run", "--config", write(tmp_path, MINIMAL)]) == 0
    assert (tmp_path / "envout" / "trace_ascpg_seed0.csv").exists()


def test_effective_config_reruns_identically(tmp_path):
    cfg = write(tmp_path, MINIMAL.replace("K = 10", "K = 200\ntrace_stride = 7") + "[run]\nn_seeds = 3\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--config", str(tmp_path / "a" / "effective.cfg"), "--out", str(tmp_path / "b"),
                 "--workers", "2"]) == 0
    for f in sorted((tmp_path / "a").iterdir()):
        if f.name != "effective.cfg":
            assert (tmp_path / "b" / f.name).read_bytes() == f.read_bytes(), f.name
    # only the echoed worker count differs
    a = (tmp_path / "a" / "effective.cfg").read_text().replace("workers = 1", "workers = 2")
    assert a == (tmp_path / "b" / "effective.cfg").read_text()


def test_invalid_config_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "[problem]\nfamily = identity\n[solver]\nK = ten\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "exp.cfg:4:" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "o")]) == 2
    assert main(["run", "--config", write(tmp_path, MINIMAL), "--window", "9", "--out", str(tmp_path / "o")]) == 2


def test_divergence_keeps_partial_outputs(tmp_path, capsys):
    cfg = write(tmp_path, MINIMAL.replace("K = 10", "K = 100") + "[schedule]\nc_a = 1e6\n[run]\nseeds = 0, 1\n")
    out = tmp_path / "o"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 3
    assert "diverged at k=" in capsys.readouterr().err
    t = RunTrace.from_csv(out / "trace_ascpg_seed1.csv")
    assert 0 < len(t) < 100
    assert not (out / "aggregate_ascpg.csv").exists()


def test_two_method_comparison(tmp_path):
    text = ("[problem]\nfamily = random_mdp\nS = 100\n[solver]\nmethods = ascpg, scgd\nK = 300\ntrace_stride = 30\n"
            "[schedule]\nregime = stronglyconvex_linear\nc_a = 0.25\nc_b = 4\n[run]\nn_seeds = 3\n")
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, text), "--out", str(out), "--axis", "iters"]) == 0
    a = np.loadtxt(out / "aggregate_ascpg.csv", delimiter=",", skiprows=1)
    b = np.loadtxt(out / "aggregate_scgd.csv", delimiter=",", skiprows=1)
    np.testing.assert_array_equal(a[:, 0], b[:, 0])
    assert a[0, 0] == 1 and a[-1, 0] == 300
    assert json.loads((out / "slope_scgd.json").read_text())["n_seeds"] == 3


def test_regularized_run_uses_reference_solution(tmp_path):
    params = {"S": 100, "d": 100, "planted": "sparse"}
    text = ("[problem]\nfamily = random_mdp\nS = 100\nd = 100\nplanted = sparse\n[solver]\nK = 5\n"
            "[schedule]\nc_a = 0.5\nc_b = 4\n[regularizer]\nkind = l1\nlam = 0.1\n")
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, text), "--out", str(out)]) == 0
    o = ProblemSpec("random_mdp", params)(0)
    ref = proximal_gradient(o.truth, Regularizer.l1(0.1), np.zeros(100))
    t = RunTrace.from_csv(out / "trace_ascpg_seed0.csv")
    assert t["dist"][0] == pytest.approx(np.linalg.norm(ref), rel=1e-12)  # x_1 = 0


def test_sweep_picks_constants(tmp_path):
    text = ("[problem]\nfamily = linear\n[solver]\nmethods = ascpg, scgd\nK = 200\n"
            "[schedule]\nregime = stronglyconvex_linear\n[sweep]\nc_a = 1e6, 0.5\nc_b = 4\nseeds = 50:52\n")
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, text), "--out", str(out)]) == 0
    report = json.loads((out / "sweep.json").read_text())
    assert report["ascpg"]["c_a"] == 0.5 and report["scgd"]["c_a"] == 0.5
    assert json.loads((out / "slope_ascpg.json").read_text())["c_a"] == 0.5


def test_slope_command(tmp_path, capsys):
    ks = np.arange(1.0, 1001.0)
    write_aggregate_csv(AggregateSeries(ks, 1 / ks, 0 * ks, 1), tmp_path / "agg.csv")
    assert main(["slope", str(tmp_path / "agg.csv")]) == 0
    assert "slope -1.000000" in capsys.readouterr().out
    fit = json.loads((tmp_path / "slope_agg.json").read_text())
    assert fit["slope"] == pytest.approx(-1.0, abs=1e-9)
    assert main(["slope", str(tmp_path / "agg.csv"), "--window", "10,100", "--out", str(tmp_path / "s")]) == 0
    assert json.loads((tmp_path / "s" / "slope_agg.json").read_text())["window"] == [10.0, 100.0]


def test_slope_nonpositive_exit_code(tmp_path):
    ks = np.arange(1.0, 101.0)
    mean = 1 / ks
    mean[-1] = 0.0
    write_aggregate_csv(AggregateSeries(ks, mean, 0 * ks, 1), tmp_path / "agg.csv")
    assert main(["slope", str(tmp_path / "agg.csv")]) == 4
    assert main(["slope", str(tmp_path / "nothing.csv")]) == 2


def test_verify_bellman(capsys):
    assert main(["verify", "bellman", "--param", "S=20", "--param", "d=4", "--draws", "2000"]) == 0
    captured = capsys.readouterr()
    assert "inner map affine: PASS" in captured.err
    report = json.loads(captured.out)
    assert report["passed"] and {c["name"] for c in report["checks"]} >= {"inner map affine", "transition matrix stochastic"}


def test_verify_mean_variance_least_squares(capsys, tmp_path):
    assert main(["verify", "meanvariance", "--param", "lam=0", "--draws", "2000", "--out", str(tmp_path)]) == 0
    assert "gradient matches least-squares gradient: PASS" in capsys.readouterr().err
    assert json.loads((tmp_path / "verify_meanvariance_seed0.json").read_text())["passed"]


def test_verify_corrupted_fixture(tmp_path, capsys):
    spec = build_baird()
    spec.P[0, 0] += 0.1
    save_mdp(spec, tmp_path / "bad.mdp")
    assert main(["verify", "baird", "--fixture", str(tmp_path / "bad.mdp"), "--draws", "1000"]) == 5
    captured = capsys.readouterr()
    assert "failed check: transition matrix stochastic" in captured.err
    assert "transition matrix stochastic" in json.loads(captured.out)["failed"]


def test_verify_argument_errors(tmp_path):
    assert main(["verify", "identity", "--param", "m=3"]) == 2
    assert main(["verify", "identity", "--param", "n"]) == 2
    assert main(["verify", "identity", "--fixture", str(tmp_path / "x.mdp")]) == 2
    with pytest.raises(SystemExit):
        main(["verify", "nosuchfamily"])


def test_unbuildable_problem_is_a_config_error(tmp_path, capsys):
    assert main(["verify", "random_mdp", "--param", "S=10", "--param", "d=20"]) == 2
    assert "rank-20" in capsys.readouterr().err
    cfg = write(tmp_path, "[problem]\nfamily = random_mdp\nS = 10\nd = 20\n[solver]\nK = 10\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "[problem]" in capsys.readouterr().err
