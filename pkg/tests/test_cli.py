"""CLI surface: subcommands, exit codes, config handling, report schema."""

import json
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from hslab.cli import main
from hslab.suites import (ConfigError, RunConfig, _jsonable, load_config, run)

DATA = Path(__file__).parent / "data"


def test_eigen_single_result():
    runner = CliRunner()
    res = runner.invoke(main, ["eigen", "--n", "3"])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["n"] == 3
    assert payload["bracket_lo"] < payload["mu_n"] < payload["bracket_hi"]


def test_eigen_suite_json(tmp_path):
    runner = CliRunner()
    out = tmp_path / "eigen.json"
    res = runner.invoke(main, ["eigen", "--budget", "low", "--seed", "3",
                               "--out", str(out)])
    assert res.exit_code == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"meta", "records", "summary"}
    assert payload["summary"]["violated"] == 0
    assert all("anchor" in r and r["anchor"] for r in payload["records"])
    assert payload["meta"]["seed"] == 3


def test_csv_format(tmp_path):
    runner = CliRunner()
    out = tmp_path / "eigen.csv"
    res = runner.invoke(main, ["eigen", "--budget", "low", "--format", "csv",
                               "--out", str(out)])
    assert res.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("name,anchor,verdict")
    assert len(lines) > 10


def test_unknown_suite_and_config_exit_two(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["bogus-suite"])
    assert res.exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mystery_key": 1}))
    res = runner.invoke(main, ["all", "--config", str(bad)])
    assert res.exit_code == 2
    bad2 = tmp_path / "bad2.json"
    bad2.write_text(json.dumps({"budgets": {"bmo": {"nope": 1}}}))
    res = runner.invoke(main, ["all", "--config", str(bad2)])
    assert res.exit_code == 2
    assert "nope" in res.output or "nope" in str(res.exception or "")


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 99, "budget": "low",
                               "budgets": {"eigen": {"n_max": 3}}}))
    runner = CliRunner()
    out = tmp_path / "r.json"
    res = runner.invoke(main, ["eigen", "--config", str(cfg), "--out", str(out),
                               "--seed", "123"])
    assert res.exit_code == 0
    payload = json.loads(out.read_text())
    # flag wins over the file for the seed; the file still supplies budgets
    assert payload["meta"]["seed"] == 123
    names = [r["name"] for r in payload["records"]]
    assert "neumann-eigenvalue[n=3]" in names
    assert "neumann-eigenvalue[n=4]" not in names


def test_config_loader_rejects_unknown_keys(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seeed": 3}))
    with pytest.raises(ConfigError):
        load_config(str(path))
    with pytest.raises(ConfigError):
        RunConfig(suite="nope").validate()
    with pytest.raises(ConfigError):
        RunConfig(budget="extreme").validate()


def test_report_schema_golden_file():
    rep = run(RunConfig(suite="eigen", seed=7, budget="low",
                        budgets={"eigen": {"n_max": 4}}))
    payload = {"records": [r.to_dict(zero_runtime=True) for r in rep.records],
               "summary": rep.summary}
    got = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    golden = (DATA / "golden_minimal.json").read_text()
    assert got == golden


def test_bmo_subcommands(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["bmo", "lower-bound", "--n", "3", "--balls", "150",
                               "--seed", "5"])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["balls_tried"] == 150
    assert payload["lower_bound"] > 0
    res = runner.invoke(main, ["bmo", "reverse-holder", "--gammas", "0.5,0.9"])
    assert res.exit_code == 0
    rows = json.loads(res.output)
    assert len(rows) == 2 and all(math.isfinite(r["rho"]) for r in rows)
    res = runner.invoke(main, ["bmo", "riesz"])
    assert res.exit_code == 0
    diag = json.loads(res.output)
    assert diag["h_harmonic_residual"] <= 1e-4
    res = runner.invoke(main, ["bmo", "doubling", "--balls", "5"])
    assert res.exit_code == 0


def test_ineq_named_corpus(tmp_path):
    corpus = tmp_path / "corpus.json"
    corpus.write_text(json.dumps({"entries": [
        {"phi": {"family": "gaussian", "width": 0.7}, "n": 3},
        {"phi": {"family": "bump", "center": [0.4, 0, 0], "r_inner": 0.3,
                 "r_outer": 0.8}, "n": 3},
    ]}))
    runner = CliRunner()
    res = runner.invoke(main, ["ineq", "--name", "hardy", "--corpus", str(corpus)])
    assert res.exit_code == 0
    rows = json.loads(res.output)
    assert len(rows) == 2
    assert all(r["verdict"] == "holds" for r in rows)


def test_hartogs_run_case(tmp_path):
    runner = CliRunner()
    csv_path = tmp_path / "decay.csv"
    out = tmp_path / "case.json"
    res = runner.invoke(main, ["hartogs", "run", "--case", "z1",
                               "--out", str(out), "--decay-csv", str(csv_path)])
    assert res.exit_code == 0
    payload = json.loads(out.read_text())
    assert payload["sup_err_truth"] <= 1e-2
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "radius,abs_u"
    assert len(lines) == 25


def test_liouville_subcommands(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["liouville", "classify", "--family",
                               "euclidean-control", "--t-max", "1e5"])
    assert res.exit_code == 0
    assert json.loads(res.output)["classification"] == "convergent"
    prof = tmp_path / "chi.csv"
    res = runner.invoke(main, ["liouville", "cutoff", "--out", str(prof)])
    assert res.exit_code == 0
    assert prof.read_text().startswith("t,chi")


def test_figures_rendered(tmp_path):
    runner = CliRunner()
    out = tmp_path / "rep.json"
    res = runner.invoke(main, ["eigen", "--budget", "low", "--out", str(out),
                               "--figures", "--seed", "4"])
    assert res.exit_code == 0
    assert (tmp_path / "rep_eigen.png").exists()


def test_exit_code_one_on_violation(monkeypatch, tmp_path):
    # force a violated record through the suite machinery
    from hslab import suites as su

    def fake_suite(seed, budget, overrides=None):
        return [su.Record(name="forced", anchor="forced-claim",
                          verdict="violated", data={"value": 1.0})]

    monkeypatch.setitem(su.SUITE_RUNNERS, "eigen", fake_suite)
    runner = CliRunner()
    res = runner.invoke(main, ["eigen", "--out", str(tmp_path / "x.json")])
    assert res.exit_code == 1
