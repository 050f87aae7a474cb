import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from greedyseq.cli import main
from greedyseq.diagnostics import metric_reports
from greedyseq.io import read_metric_csv, read_points, write_points
from greedyseq.kernel import bernoulli2
from greedyseq.sequence import PointSet, greedy, threads, van_der_corput


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_example(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, stdout, _ = run(["generate", "--kernel", "bernoulli2", "--seed", "1/3,4/5", "--n", "250",
                           "--tie-break", "largest", "--out", str(out)], capsys)
    assert code == 0
    info = json.loads(stdout)
    assert info["n"] == 250 and info["max_gate_residual"] <= 1e-9
    ps = read_points(out)
    assert len(ps) == 250
    assert np.floor(ps.x[2:8] * 1000).tolist() == [66, 566, 941, 441, 191, 691]
    assert ps.provenance["seed_literals"] == ["1/3", "4/5"]


def test_generate_torus_and_logsin(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = run(["generate", "--kernel", "green", "--dim", "3", "--cutoff", "16", "--grid", "64",
                      "--seed", "0.5,0.5,0.5", "--n", "128", "--out", str(out)], capsys)
    assert code == 0
    assert read_points(out).points.shape == (128, 3)
    out = tmp_path / "l.csv"
    code, _, _ = run(["generate", "--kernel", "logsin", "--seed", "0.5", "--n", "64", "--out", str(out)], capsys)
    assert code == 0
    code, _, _ = run(["analyze", "--points", str(out), "--kernel", "logsin", "--metrics", "energy",
                      "--checkpoints", "64", "--out", str(tmp_path / "lm.csv")], capsys)
    assert code == 0
    assert math.isfinite(read_metric_csv(tmp_path / "lm.csv")[0][2])


def test_seed_from_file(tmp_path, capsys):
    seed = tmp_path / "seed.csv"
    write_points(seed, PointSet(np.array([1 / 3, 4 / 5])))
    out = tmp_path / "p.csv"
    assert run(["generate", "--kernel", "bernoulli2", "--seed", str(seed), "--n", "10", "--out", str(out)], capsys)[0] == 0
    assert np.array_equal(read_points(out).points, greedy(bernoulli2(), [1 / 3, 4 / 5], 10).points)


def test_generate_then_analyze_matches_in_process(tmp_path, capsys):
    pts = tmp_path / "p.csv"
    run(["generate", "--kernel", "bernoulli2", "--seed", "0.1,0.6", "--n", "128", "--out", str(pts)], capsys)
    metrics = "energy,sup_norm,l1_norm,deriv_l2,diaphony,star_discrepancy,w2_exact,w1_exact,weyl_max_ratio"
    out = tmp_path / "m.csv"
    code, _, _ = run(["analyze", "--points", str(pts), "--kernel", "bernoulli2", "--metrics", metrics,
                      "--checkpoints", "16,64,128", "--out", str(out)], capsys)
    assert code == 0
    rows = read_metric_csv(out)
    ref = metric_reports(greedy(bernoulli2(), [0.1, 0.6], 128), bernoulli2(), [16, 64, 128], metrics.split(","))
    expected = [row for r in ref for row in r.rows(metrics.split(","))]
    assert rows == [(n, m, float(v), float(t)) for n, m, v, t in expected]
    assert json.loads(out.with_suffix(".json").read_text())[0]["n"] == 16


def test_analyze_midpoint_lattice(tmp_path, capsys):
    n = 100
    p = tmp_path / "mid.csv"
    write_points(p, PointSet((np.arange(n) + 0.5) / n))
    code, _, _ = run(["analyze", "--points", str(p), "--metrics", "w2_exact", "--checkpoints", "100",
                      "--out", str(tmp_path / "m.csv")], capsys)
    assert code == 0
    assert read_metric_csv(tmp_path / "m.csv")[0][2] == pytest.approx(1 / (2 * math.sqrt(3) * n), abs=1e-12)


def test_analyze_vdc_star_discrepancy_envelope(tmp_path, capsys):
    p = tmp_path / "v.csv"
    write_points(p, van_der_corput(2, 1024))
    run(["analyze", "--points", str(p), "--metrics", "star_discrepancy", "--out", str(tmp_path / "m.csv")], capsys)
    rows = read_metric_csv(tmp_path / "m.csv")
    for n, _, v, _ in rows:
        assert v <= (math.log2(n) + 3) / n


@pytest.mark.parametrize("content", ["", "index,x1\n"])
def test_analyze_empty_file_exit_4(tmp_path, capsys, content):
    p = tmp_path / "e.csv"
    p.write_text(content)
    code, _, err = run(["analyze", "--points", str(p)], capsys)
    assert code == 4
    assert json.loads(err) == {"error": "no points", "exit_code": 4}


def test_analyze_missing_file_exit_4(tmp_path, capsys):
    code, _, err = run(["analyze", "--points", str(tmp_path / "nope.csv")], capsys)
    assert code == 4 and "error" in json.loads(err)


def test_metric_without_kernel_exit_2(tmp_path, capsys):
    p = tmp_path / "p.csv"
    write_points(p, van_der_corput(2, 8))
    code, _, err = run(["analyze", "--points", str(p), "--metrics", "sup_norm"], capsys)
    assert code == 2 and "kernel" in json.loads(err)["error"]


def test_gate_failure_exit_3(tmp_path, capsys):
    code, _, err = run(["generate", "--kernel", "bernoulli2", "--seed", "0.5", "--n", "5", "--eps-pot", "-1",
                        "--out", str(tmp_path / "p.csv")], capsys)
    assert code == 3
    assert "no nonpositive candidate" in json.loads(err)["error"]
    assert not (tmp_path / "p.csv").exists()


def test_config_errors_exit_2(tmp_path, capsys):
    assert run(["generate", "--seed", "0.5", "--n", "5"], capsys)[0] == 2
    assert run(["generate", "--kernel", "green", "--seed", "0.5", "--n", "5"], capsys)[0] == 2
    assert run(["generate", "--kernel", "bernoulli2", "--seed", "x/y", "--n", "5"], capsys)[0] == 2
    assert run(["generate", "--kernel", "green", "--dim", "2", "--seed", "0.5", "--n", "5"], capsys)[0] == 2
    assert run(["bogus"], capsys)[0] == 2


def test_compare_single_generator(tmp_path, capsys):
    code, _, err = run(["compare", "--gen", "vdc:2", "--out", str(tmp_path)], capsys)
    assert code == 2 and json.loads(err)["error"] == "need two generators"


def test_compare_table(tmp_path, capsys):
    code, _, _ = run(["compare", "--gen", "greedy:bernoulli2:1/3,4/5", "--gen", "kronecker:sqrt2",
                      "--gen", "vdc:2", "--n", "1024", "--out", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "compare.csv").read_text().splitlines()
    assert lines[0] == "generator,n,metric,value,tail_bound"
    assert len(lines) == 1 + 3 * 11 * 3
    fits = json.loads((tmp_path / "fits.json").read_text())
    assert set(fits) == {"greedy-bernoulli2", "kronecker-1.41421", "vdc-2"}


def test_scan_and_bad_spec(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"name": "g", "generator": "greedy:bernoulli2:1/3,4/5",
                                "checkpoints": [32, 64, 128], "metrics": ["w2_exact"],
                                "fits": {"w2_exact": ["inv_sqrt"]}}))
    code, _, _ = run(["scan", "--spec", str(spec), "--out", str(tmp_path / "res")], capsys)
    assert code == 0
    assert (tmp_path / "res" / "g" / "w2_exact.csv").exists()
    spec.write_text(json.dumps({"name": "g", "generator": "vdc:2", "checkpoints": [4, 2], "metrics": ["w2_exact"]}))
    assert run(["scan", "--spec", str(spec)], capsys)[0] == 2
    assert run(["scan", "--spec", str(tmp_path / "missing.json")], capsys)[0] == 4


def test_figures(tmp_path, capsys):
    code, _, _ = run(["figures", "--kernel", "bernoulli2", "--seed", "0.3,0.8", "--n", "101",
                      "--n-list", "10,100", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "curves.csv").exists() and (tmp_path / "scatter.csv").exists()


def test_threads_env(monkeypatch):
    monkeypatch.setenv("GREEDYSEQ_THREADS", "3")
    assert threads() == 3
    monkeypatch.setenv("GREEDYSEQ_THREADS", "zero")
    assert threads() == 1


def test_console_script_subprocess(tmp_path):
    env = dict(os.environ, GREEDYSEQ_THREADS="2")
    out = tmp_path / "p.csv"
    res = subprocess.run([sys.executable, "-m", "greedyseq.cli", "generate", "--kernel", "bernoulli2",
                          "--seed", "1/3,4/5", "--n", "20", "--out", str(out)],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    assert len(read_points(out)) == 20
