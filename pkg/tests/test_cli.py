import json
import math

import numpy as np
import pytest

from hawkes_exact import Exponential, HawkesParams
from hawkes_exact.cgf import algorithm1_cost, psi_B_boundary
from hawkes_exact.cli import main
from hawkes_exact.config import choose_eta, config_from_dict, load_config
from hawkes_exact.errors import ModelError
from hawkes_exact.io import SCHEMA_LINE, event_dump_rows, read_csv_rows, write_event_dump, write_rows
from hawkes_exact.stats import ks_one_sample_mixed, mm1_wait_cdf, summarize

MODEL = {"lambda0": 1.0, "h1": 0.5, "birth": {"kind": "exponential", "rate": 2.0},
         "service": {"kind": "exponential", "rate": 3.0}, "eta": 0.2}


def write_config(tmp_path, **kw):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(dict(MODEL, **kw)))
    return str(path)


# configuration

def test_config_roundtrip(tmp_path):
    cfg = load_config(write_config(tmp_path, replications=7, seed=3, format="jsonl"))
    assert cfg.replications == 7 and cfg.seed == 3 and cfg.format == "jsonl"
    assert cfg.hawkes == HawkesParams(1.0, 0.5, Exponential(2.0))
    assert cfg.model_dict()["service"] == {"kind": "exponential", "rate": 3.0}


@pytest.mark.parametrize("patch, fragment", [
    ({"colour": 1}, "unknown config keys"),
    ({"eta": 0.4}, "feasible tilt range"),
    ({"eta": "best"}, "eta must be"),
    ({"replications": 0}, "replications"),
    ({"format": "xml"}, "format"),
    ({"h1": 1.2}, "h1"),
    ({"birth": {"kind": "pareto"}}, "pareto"),
])
def test_config_errors(patch, fragment):
    with pytest.raises(ModelError, match=fragment):
        config_from_dict(dict(MODEL, **patch))


def test_config_missing_key():
    raw = dict(MODEL)
    del raw["birth"]
    with pytest.raises(ModelError, match="birth"):
        config_from_dict(raw)


def test_unstable_queue_is_rejected_before_running():
    cfg = config_from_dict(dict(MODEL, lambda0=2.0))
    with pytest.raises(ModelError, match="unstable"):
        cfg.queue


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ModelError, match="invalid JSON"):
        load_config(p)


def test_choose_eta_minimizes_cost():
    p = HawkesParams(1.0, 0.5, Exponential(2.0))
    eta = choose_eta(p)
    bound = psi_B_boundary(p)
    assert 0 < eta < bound
    grid = np.geomspace(bound * 1e-3, bound * (1 - 1e-3), 50)
    best = min(algorithm1_cost(p, float(e)) for e in grid)
    assert algorithm1_cost(p, eta) == best
    assert algorithm1_cost(p, eta) < algorithm1_cost(p, 0.2)


# statistics and io

def test_summary_stats():
    s = summarize([1.0, 2.0, 3.0, 6.0])
    assert s.mean == 3.0 and s.variance == pytest.approx(14.0 / 3.0)
    assert s.vmr == pytest.approx(s.variance / s.mean)
    assert s.ci95_halfwidth == pytest.approx(1.96 * math.sqrt(s.variance) / 2.0)
    assert s.covers(3.5) and not s.covers(10.0)


def test_mixed_ks_accepts_exact_mm1_law(rng):
    rho, mu = 1 / 3, 3.0
    n = 10000
    busy = rng.random(n) < rho
    x = np.where(busy, rng.exponential(1 / (mu * (1 - rho)), n), 0.0)
    cdf, left = mm1_wait_cdf(rho, mu)
    d, p = ks_one_sample_mixed(x, cdf, left)
    assert p > 0.01
    # shifting the tail must be detected
    d2, p2 = ks_one_sample_mixed(x * 1.2, cdf, left)
    assert p2 < 0.01


def test_write_rows_csv_and_jsonl(tmp_path):
    rows = [{"rep": 0, "w": 0.1 + 0.2, "seed": 1}, {"rep": 1, "w": 1e-17, "seed": 1}]
    p = write_rows(tmp_path / "a.csv", rows, ["rep", "w", "seed"])
    text = p.read_text().splitlines()
    assert text[0] == SCHEMA_LINE and text[1] == "rep,w,seed"
    back = read_csv_rows(p)
    assert [float(r["w"]) for r in back] == [0.1 + 0.2, 1e-17]
    q = write_rows(tmp_path / "a.jsonl", rows, ["rep", "w", "seed"], "jsonl")
    assert [json.loads(ln)["w"] for ln in q.read_text().splitlines()] == [0.1 + 0.2, 1e-17]
    with pytest.raises(ValueError):
        write_rows(tmp_path / "a.x", rows, ["rep"], "xml")


def test_event_dump(base_model, rng, tmp_path):
    from hawkes_exact import sample_stationary_forward
    w = sample_stationary_forward(base_model, 0.2, 5.0, Exponential(3.0), rng)
    rows = event_dump_rows(w.clusters())
    assert len(rows) == sum(c.size for c in w.clusters())
    assert all(r["parent"] < r["event_index"] for r in rows)
    p = write_event_dump(tmp_path / "ev.csv", w.clusters())
    assert read_csv_rows(p)[0].keys() == {"cluster_id", "event_index", "time", "parent",
                                          "service"}


# command line

def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sample_hawkes_deterministic(tmp_path, capsys):
    paths = []
    for name, jobs in (("a", "1"), ("b", "1"), ("c", "3")):
        out = tmp_path / f"{name}.csv"
        code, _, _ = run_cli(["sample-hawkes", "--reps", "40", "--seed", "9", "--eta", "0.1",
                              "--out", str(out), "--jobs", jobs], capsys)
        assert code == 0
        paths.append(out)
    data = [p.read_bytes() for p in paths]
    assert data[0] == data[1] == data[2]
    summaries = [p.with_name(p.stem + ".summary.json").read_bytes() for p in paths]
    assert summaries[0] == summaries[1] == summaries[2]
    rows = read_csv_rows(paths[0])
    assert len(rows) == 40 and rows[0].keys() == {"rep", "n_events", "rv_count", "n0_clusters",
                                                  "seed"}


def test_single_replication_bit_identical(tmp_path, capsys):
    outs = []
    for name in ("x", "y"):
        out = tmp_path / f"{name}.jsonl"
        run_cli(["sample-queue", "--reps", "1", "--seed", "4", "--format", "jsonl",
                 "--out", str(out)], capsys)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rec = json.loads(outs[0])
    assert set(rec) == {"rep", "w", "t_ps", "horizon", "rounds", "rv_count", "seed"}


def test_sample_queue_summary_recomputable(tmp_path, capsys):
    out = tmp_path / "q.csv"
    code, stdout, _ = run_cli(["sample-queue", "--reps", "60", "--seed", "2", "--out", str(out),
                               "--jobs", "2"], capsys)
    assert code == 0
    summary = json.loads(stdout)
    w = np.array([float(r["w"]) for r in read_csv_rows(out)])
    s = summarize(w)
    assert abs(summary["mean_w"] - s.mean) < 1e-12
    assert abs(summary["var_w"] - s.variance) < 1e-12
    assert abs(summary["ci95_halfwidth"] - s.ci95_halfwidth) < 1e-12
    assert np.all(w >= 0)


def test_mixing_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path, mixing_times=[0, 5, 20], replications=30)
    out = tmp_path / "mix.csv"
    code, stdout, _ = run_cli(["mixing", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0
    rows = read_csv_rows(out)
    naive = [r for r in rows if r["table"] == "naive_w"]
    assert [float(r["x"]) for r in naive] == [0.0, 5.0, 20.0]
    assert float(naive[0]["y"]) == 0.0
    hist = [r for r in rows if r["table"] == "t_ps_hist"]
    assert sum(int(r["n"]) for r in hist) == 30
    assert {r["table"] for r in rows} == {"naive_w", "perfect_w", "mean_t_ps", "t_ps_hist"}
    summary = json.loads(stdout)
    assert 0 <= summary["frac_t_ps_below_20"] <= 1


def test_cost_command(capsys):
    code, stdout, _ = run_cli(["cost", "--grid", "0.1,0.2,0.4"], capsys)
    assert code == 0
    lines = [ln.split("\t") for ln in stdout.strip().splitlines()]
    assert float(lines[1][1]) == pytest.approx(21.5534, rel=1e-4)
    assert lines[2][1] == "inf"


def test_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, lambda0=2.0)
    code, _, err = run_cli(["sample-queue", "--config", cfg, "--reps", "2"], capsys)
    assert code == 2 and "unstable" in err


def test_validate_passes_and_reports(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, err = run_cli(["validate", "--out", str(out)], capsys)
    report = json.loads(out.read_text())
    assert code == 0 and report["passed"]
    names = {s["name"] for s in report["suites"]}
    assert names == {"tilting_identity", "fixed_point_residuals", "b_ge_l",
                     "definition_equivalence", "n0_intensity", "pathwise_dominance",
                     "pk_degenerate", "record_marginal"}
    for s in report["suites"]:
        assert s["n"] > 0 and "p_value" in s
    assert err.count("PASS") == 8


def test_validate_negative_control_fails(capsys):
    code, stdout, err = run_cli(["validate", "--suite", "n0_intensity", "--perturb-eta", "0.1"],
                                capsys)
    assert code == 1 and "FAIL n0_intensity" in err
    assert json.loads(stdout)["suites"][0]["p_value"] < 0.01
