import json

import numpy as np
import pytest
from click.testing import CliRunner

from hsdl.cli import main
from hsdl.errors import ConvergenceError


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


BALL = {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0}
CONST_DOWN = {"kind": "affine", "M": [[0.0, 0.0], [0.0, 0.0]], "c": [0.0, 3.0],
              "claimed_nonvanishing": True}


def test_vi_solve_success(runner, tmp_path):
    body = write(tmp_path, "body.json", BALL)
    field = write(tmp_path, "field.json", CONST_DOWN)
    out = tmp_path / "sol.json"
    result = runner.invoke(main, ["vi-solve", "--body", body, "--field", field,
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    sol = json.loads(out.read_text())
    np.testing.assert_allclose(sol["x"], [0.0, 1.0], atol=1e-7)
    assert sol["lambda"] == pytest.approx(3.0, abs=1e-6)
    assert sol["residual"] <= 1e-8


def test_vi_solve_budget_exhaustion_exit_2(runner, tmp_path, monkeypatch):
    import hsdl.cli as cli_mod

    def fake_solve(problem, cfg):
        raise ConvergenceError("stalled", best=np.zeros(2), residual=0.5)

    monkeypatch.setattr(cli_mod, "solve", fake_solve)
    body = write(tmp_path, "body.json", BALL)
    field = write(tmp_path, "field.json", CONST_DOWN)
    out = tmp_path / "sol.json"
    result = runner.invoke(main, ["vi-solve", "--body", body, "--field", field,
                                  "--out", str(out)])
    assert result.exit_code == 2
    assert json.loads(out.read_text())["residual"] == 0.5


def test_vi_solve_bad_input_exit_1(runner, tmp_path):
    body = write(tmp_path, "body.json", {"kind": "torus"})
    field = write(tmp_path, "field.json", CONST_DOWN)
    result = runner.invoke(main, ["vi-solve", "--body", body, "--field", field,
                                  "--out", str(tmp_path / "x.json")])
    assert result.exit_code == 1


def test_check_bound_cli(runner, tmp_path):
    body = write(tmp_path, "body.json", BALL)
    field = write(tmp_path, "field.json",
                  {"kind": "translation", "xprime": [3.0, 0.0], "claimed_nonvanishing": True})
    out = tmp_path / "report.json"
    result = runner.invoke(main, ["check-bound", "--body", body, "--field", field,
                                  "--kind", "thm31", "--budget", "64", "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert report["verdict"] == "holds_with_equality"
    assert report["bound_kind"] == "euclidean_thm31"


def test_check_bound_thm42_requires_mu(runner, tmp_path):
    body = write(tmp_path, "body.json", BALL)
    field = write(tmp_path, "field.json", {"kind": "poly1d", "coeffs": [1.0, 0.0, 1.0]})
    result = runner.invoke(main, ["check-bound", "--body", body, "--field", field,
                                  "--kind", "thm42", "--out", str(tmp_path / "r.json")])
    assert result.exit_code == 1


def test_check_bound_thm42_with_mu(runner, tmp_path):
    body = write(tmp_path, "body.json", BALL)
    field = write(tmp_path, "field.json",
                  {"kind": "poly1d", "coeffs": [1.0, 0.0, 1.0], "claimed_nonvanishing": True})
    out = tmp_path / "r.json"
    result = runner.invoke(main, ["check-bound", "--body", body, "--field", field,
                                  "--kind", "thm42", "--mu", "2.0", "--budget", "64",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert report["slack"] == pytest.approx(1.0, abs=1e-6)


def test_sweep_rotation_cli(runner, tmp_path):
    out = tmp_path / "sweep.csv"
    result = runner.invoke(main, ["sweep-rotation", "--alphas", "5", "--budget", "64",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "alpha,d_estimate,d_closed_form,gamma,slack"
    assert len(lines) == 6


def test_campaign_run_malformed_json_exit_1(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json }")
    result = runner.invoke(main, ["campaign", "run", str(bad)])
    assert result.exit_code == 1
    assert "line" in result.output


def test_campaign_run_schema_error_exit_1(runner, tmp_path):
    cfg = write(tmp_path, "cfg.json", {"campaign": "x", "items": []})
    result = runner.invoke(main, ["campaign", "run", cfg])
    assert result.exit_code == 1
    assert "$.seed" in result.output


def test_campaign_run_violation_exit_3(runner, tmp_path):
    cfg = write(tmp_path, "cfg.json", {
        "campaign": "bad", "seed": 3,
        "items": [{"check": "bound", "kind": "thm22",
                   "body": BALL,
                   "field": {"kind": "rotation2d", "alpha": 0.5,
                             "claimed_nonvanishing": True},
                   "budget": {"multistarts": 64, "max_iters": 200}}]})
    result = runner.invoke(main, ["campaign", "run", cfg, "--out", str(tmp_path / "r.json")])
    assert result.exit_code == 3


def test_campaign_run_ok_exit_0(runner, tmp_path):
    cfg = write(tmp_path, "cfg.json", {
        "campaign": "ok", "seed": 3,
        "items": [{"check": "bound", "kind": "thm22",
                   "body": BALL,
                   "field": {"kind": "translation", "xprime": [2.0, 0.0],
                             "claimed_nonvanishing": True},
                   "budget": {"multistarts": 64, "max_iters": 200}}]})
    out = tmp_path / "report.json"
    result = runner.invoke(main, ["campaign", "run", cfg, "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_theorem_preset_q4(runner, tmp_path):
    result = runner.invoke(main, ["theorem", "--id", "q4", "--out", str(tmp_path / "out")])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "q4" / "q4.report.json").read_text())
    assert report["campaign"] == "q4"
    assert report["aggregate"]["ok"] == report["aggregate"]["items"]


def test_plot_cli_roundtrip(runner, tmp_path):
    cfg = write(tmp_path, "cfg.json", {
        "campaign": "sweep", "seed": 3,
        "items": [{"check": "rotation_sweep", "alphas": 5,
                   "budget": {"multistarts": 64, "max_iters": 200}}]})
    report = tmp_path / "r.json"
    result = runner.invoke(main, ["campaign", "run", cfg, "--out", str(report)])
    assert result.exit_code == 0
    out = tmp_path / "p.svg"
    result = runner.invoke(main, ["plot", "--report", str(report),
                                  "--kind", "rotation_sweep", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()
    result = runner.invoke(main, ["plot", "--report", str(report),
                                  "--kind", "slack_histogram", "--out", str(tmp_path / "q.svg")])
    assert result.exit_code == 1
