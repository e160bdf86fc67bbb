"""Command-line entry point `hsdl`.

Exit codes: 0 success; 1 input/schema problems; 2 solver budget exhaustion
(vi-solve); 3 a campaign item was numerically violated on a field claimed
nonvanishing.
"""

import json
import math
import sys
from importlib import resources
from pathlib import Path

import click
import numpy as np

from .displacement import sup_displacement, inf_norm, check_eigen_bound, check_lower_bound
from .errors import ConvergenceError, InputError
from .fields import Rotation2D, field_from_json, rotation_sup_displacement
from .geometry import Ball, body_from_json
from .harness import BOUND_KIND_ALIASES, render_plot, run_campaign
from .norms import norm_from_json
from .optimize import SearchBudget
from .vi import SolveConfig, VIProblem, solve

PRESET_IDS = ("q1", "q2", "q3", "q4", "q5", "q6")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        click.echo(f"error: {path}: line {exc.lineno} column {exc.colno}: {exc.msg}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Displacement-bound laboratory."""


@main.command("vi-solve")
@click.option("--body", "body_path", required=True, type=click.Path(exists=True))
@click.option("--field", "field_path", required=True, type=click.Path(exists=True))
@click.option("--tol", default=1e-8, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def vi_solve(body_path, field_path, tol, seed, out_path):
    """Solve the variational inequality for a body/field pair."""
    try:
        body = body_from_json(_load_json(body_path))
        fld = field_from_json(_load_json(field_path))
        problem = VIProblem(body, fld)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    try:
        sol = solve(problem, SolveConfig(eps_res=tol, seed=seed))
    except ConvergenceError as exc:
        payload = {"error": str(exc), "residual": exc.residual,
                   "x": None if exc.best is None else np.asarray(exc.best).tolist()}
        Path(out_path).write_text(json.dumps(payload, indent=2) + "\n")
        click.echo(f"budget exhausted: residual {exc.residual:.3e} > tol {tol:g}", err=True)
        sys.exit(2)
    payload = sol.to_json()
    payload["inputs"] = {"body": body.to_json(), "field": fld.to_json()}
    Path(out_path).write_text(json.dumps(payload, indent=2) + "\n")
    click.echo(f"solved: residual {sol.residual:.3e}, classification {sol.classification}")


@main.command("check-bound")
@click.option("--body", "body_path", required=True, type=click.Path(exists=True))
@click.option("--field", "field_path", required=True, type=click.Path(exists=True))
@click.option("--norm", "norm_path", type=click.Path(exists=True))
@click.option("--kind", required=True,
              type=click.Choice(["thm22", "thm31", "thm35", "cor36", "thm42"]))
@click.option("--mu", type=float, default=None, help="required for --kind thm42")
@click.option("--seed", default=1, show_default=True)
@click.option("--budget", default=128, show_default=True, help="multistart count")
@click.option("--out", "out_path", required=True, type=click.Path())
def check_bound(body_path, field_path, norm_path, kind, mu, seed, budget, out_path):
    """Verify one displacement lower bound and write the report."""
    cfg = SearchBudget(multistarts=budget, seed=seed)
    try:
        fld = field_from_json(_load_json(field_path))
        if kind == "thm42":
            if mu is None:
                raise InputError("--kind thm42 requires --mu")
            report = check_eigen_bound(fld, mu, cfg)
        else:
            body = body_from_json(_load_json(body_path))
            norm = norm_from_json(_load_json(norm_path)) if norm_path else None
            report = check_lower_bound(fld, body, norm, BOUND_KIND_ALIASES[kind], cfg)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    Path(out_path).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    click.echo(f"{report.bound_kind}: verdict {report.verdict}, slack {report.slack:.3e}")


@main.command("sweep-rotation")
@click.option("--alphas", default=25, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--budget", default=128, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def sweep_rotation(alphas, seed, budget, out_path):
    """Sweep the planar rotation family and write a CSV table."""
    import csv

    cfg = SearchBudget(multistarts=budget, seed=seed)
    body = Ball(np.zeros(2), 1.0)
    with Path(out_path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "d_estimate", "d_closed_form", "gamma", "slack"])
        for alpha in np.linspace(-math.pi, math.pi, alphas):
            fld = Rotation2D(float(alpha))
            d = sup_displacement(fld, body, None, cfg).value
            gamma = 1.0 + inf_norm(fld, body, None, cfg).value
            writer.writerow([float(alpha), d, rotation_sup_displacement(float(alpha)),
                             gamma, d - gamma])
    click.echo(f"wrote {out_path}")


def _finish_campaign(report_path):
    report = json.loads(Path(report_path).read_text())
    bad = report["aggregate"]["violated_nonvanishing"]
    click.echo(f"report: {report_path} ({report['aggregate']['ok']}/{report['aggregate']['items']} ok)")
    if bad:
        click.echo(f"{bad} item(s) numerically violated on claimed-nonvanishing fields", err=True)
        sys.exit(3)


@main.command("theorem")
@click.option("--id", "preset_id", required=True, type=click.Choice(PRESET_IDS))
@click.option("--out", "out_dir", default="hsdl_out", show_default=True, type=click.Path())
def theorem(preset_id, out_dir):
    """Run one of the shipped preset campaigns."""
    preset = resources.files("hsdl").joinpath(f"presets/{preset_id}.json")
    out = Path(out_dir) / preset_id
    out.mkdir(parents=True, exist_ok=True)
    config_path = out / f"{preset_id}.json"
    config_path.write_text(preset.read_text())
    try:
        report_path = run_campaign(config_path, out / f"{preset_id}.report.json")
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _finish_campaign(report_path)


@main.group()
def campaign():
    """Campaign configs."""


@campaign.command("run")
@click.argument("config", type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path())
def campaign_run(config, out_path):
    """Run a campaign config and write its JSON report (+ CSV side tables)."""
    _load_json(config)  # surfaces malformed JSON with line/column, exit 1
    try:
        report_path = run_campaign(config, out_path)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _finish_campaign(report_path)


@main.command("plot")
@click.option("--report", "report_path", required=True, type=click.Path(exists=True))
@click.option("--kind", required=True,
              type=click.Choice(["rotation_sweep", "growth_profile", "slack_histogram"]))
@click.option("--out", "out_path", required=True, type=click.Path())
def plot(report_path, kind, out_path):
    """Render an SVG plot from a campaign report."""
    try:
        render_plot(report_path, kind, out_path)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
