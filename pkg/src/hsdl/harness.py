"""Campaign ingestion, execution, reporting, and plot emission.

A campaign is a JSON config with a mandatory seed and a list of items; each
item names a check (bound, eigen, vi, sharpness, rotation_sweep,
growth_profile, projection_minorant, functional_zero) plus its descriptors.
Reports are JSON with CSV side tables for sweeps; rerunning a config with the
same seed reproduces the report bit-for-bit (a timestamp field is excluded
from the hash).  Numeric failures are recorded per item and never abort the
campaign; schema problems abort before anything runs.
"""

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .displacement import (KIND_COR36, KIND_THM22, KIND_THM31, KIND_THM35,
                           NUMERICALLY_VIOLATED, check_eigen_bound,
                           check_lower_bound, find_functional_zero,
                           growth_profile, projection_minorant_check,
                           sharpness_witness, sup_displacement, inf_norm)
from .errors import ConvergenceError, InputError
from .fields import Rotation2D, field_from_json, rotation_sup_displacement
from .geometry import Ball, body_from_json
from .norms import Euclidean, norm_from_json
from .optimize import SearchBudget
from .vi import SolveConfig, VIProblem, solve

BOUND_KIND_ALIASES = {
    "thm22": KIND_THM22, "thm31": KIND_THM31, "thm35": KIND_THM35,
    "cor36": KIND_COR36, "thm42": "eigen_thm42",
    KIND_THM22: KIND_THM22, KIND_THM31: KIND_THM31, KIND_THM35: KIND_THM35,
    KIND_COR36: KIND_COR36, "eigen_thm42": "eigen_thm42",
}

_CHECKS = ("bound", "eigen", "vi", "sharpness", "rotation_sweep",
           "growth_profile", "projection_minorant", "functional_zero")

_BODY_KINDS = ("ball", "hpolytope", "ellipsoid")
_NORM_KINDS = ("euclidean", "lp", "weighted", "polyhedral", "pushforward")
_FIELD_KINDS = ("rotation2d", "translation", "boundary_translate", "affine", "identity",
                "scaled", "kakutani", "radial_extension", "displacement_form",
                "subspace_split", "poly1d")


@dataclass(frozen=True)
class CampaignConfig:
    campaign: str
    seed: int
    items: list

    @staticmethod
    def from_dict(raw: dict) -> "CampaignConfig":
        errors = validate_config(raw)
        if errors:
            raise InputError("; ".join(errors))
        return CampaignConfig(campaign=str(raw["campaign"]), seed=int(raw["seed"]),
                              items=list(raw["items"]))


def validate_config(raw) -> list:
    """Schema check; returns a list of path-anchored error strings."""
    errors = []
    if not isinstance(raw, dict):
        return ["$: config must be a JSON object"]
    if "campaign" not in raw:
        errors.append("$.campaign: missing")
    if "seed" not in raw:
        errors.append("$.seed: missing (campaigns must be seeded, no wall-clock entropy)")
    elif not isinstance(raw["seed"], int):
        errors.append("$.seed: must be an integer")
    items = raw.get("items")
    if not isinstance(items, list):
        errors.append("$.items: missing or not a list")
        return errors
    for i, item in enumerate(items):
        where = f"$.items[{i}]"
        if not isinstance(item, dict):
            errors.append(f"{where}: must be an object")
            continue
        check = item.get("check")
        if check not in _CHECKS:
            errors.append(f"{where}.check: unknown check {check!r} (expected one of {_CHECKS})")
            continue
        needs = {
            "bound": ("kind", "body", "field"),
            "eigen": ("mu", "field"),
            "vi": ("body", "field"),
            "sharpness": ("body", "alpha"),
            "rotation_sweep": ("alphas",),
            "growth_profile": ("phi", "psi", "radii"),
            "projection_minorant": ("phi", "N", "m"),
            "functional_zero": ("psi", "A"),
        }[check]
        for key in needs:
            if key not in item:
                errors.append(f"{where}.{key}: missing for check {check!r}")
        if check == "bound" and item.get("kind") not in BOUND_KIND_ALIASES:
            errors.append(f"{where}.kind: unknown bound kind {item.get('kind')!r}")
        known = {"body": _BODY_KINDS, "norm": _NORM_KINDS, "field": _FIELD_KINDS,
                 "phi": _FIELD_KINDS, "psi": _FIELD_KINDS}
        for desc_key, kinds in known.items():
            desc = item.get(desc_key)
            if desc is None:
                continue
            if not isinstance(desc, dict) or "kind" not in desc:
                errors.append(f"{where}.{desc_key}: descriptor must be an object with 'kind'")
            elif desc["kind"] not in kinds:
                errors.append(f"{where}.{desc_key}.kind: unknown kind {desc['kind']!r}")
    return errors


def _budget_from(item, seed) -> SearchBudget:
    raw = item.get("budget", {})
    return SearchBudget(multistarts=int(raw.get("multistarts", 128)),
                        max_iters=int(raw.get("max_iters", 500)),
                        seed=seed)


def _claimed(item) -> bool:
    fld = item.get("field") or item.get("psi") or {}
    return bool(fld.get("claimed_nonvanishing", False))


def _run_item(index: int, item: dict, campaign_seed: int) -> dict:
    seed = campaign_seed + 1000 * index
    check = item["check"]
    cfg = _budget_from(item, seed)
    out = {"index": index, "check": check, "inputs": item}
    try:
        if check == "bound":
            body = body_from_json(item["body"])
            fld = field_from_json(item["field"])
            norm = norm_from_json(item["norm"]) if "norm" in item else None
            kind = BOUND_KIND_ALIASES[item["kind"]]
            if kind == "eigen_thm42":
                raise InputError("use check 'eigen' for the eigen bound")
            rep = check_lower_bound(fld, body, norm, kind, cfg)
            out["result"] = rep.to_json()
            out["ok"] = not (rep.verdict == NUMERICALLY_VIOLATED and fld.claimed_nonvanishing)
        elif check == "eigen":
            fld = field_from_json(item["field"])
            rep = check_eigen_bound(fld, float(item["mu"]), cfg)
            out["result"] = rep.to_json()
            out["ok"] = not (rep.verdict == NUMERICALLY_VIOLATED and fld.claimed_nonvanishing)
        elif check == "vi":
            body = body_from_json(item["body"])
            fld = field_from_json(item["field"])
            tol = float(item.get("tol", 1e-8))
            sol = solve(VIProblem(body, fld), SolveConfig(eps_res=tol, seed=seed))
            out["result"] = sol.to_json()
            out["ok"] = sol.residual <= tol
        elif check == "sharpness":
            body = body_from_json(item["body"])
            fld, rep = sharpness_witness(body, float(item["alpha"]),
                                         float(item.get("eps", 0.1)), cfg)
            out["result"] = rep.to_json()
            out["result"]["witness_field"] = fld.to_json()
            # Success means the alpha-inequality was violated by a field
            # verified nonvanishing (inf > 0).
            out["ok"] = (rep.verdict == NUMERICALLY_VIOLATED
                         and rep.inf_hat.value > 0.0)
        elif check == "rotation_sweep":
            count = int(item["alphas"])
            body = Ball(np.zeros(2), 1.0)
            rows = []
            for alpha in np.linspace(-math.pi, math.pi, count):
                est = sup_displacement(Rotation2D(float(alpha)), body, None, cfg)
                gamma = 1.0 + inf_norm(Rotation2D(float(alpha)), body, None, cfg).value
                closed = rotation_sup_displacement(float(alpha))
                rows.append({"alpha": float(alpha), "d_estimate": est.value,
                             "d_closed_form": closed, "gamma": gamma,
                             "slack": est.value - gamma})
            out["result"] = {"rows": rows}
            out["ok"] = max(abs(r["d_estimate"] - r["d_closed_form"]) for r in rows) <= 1e-3
        elif check == "growth_profile":
            phi = field_from_json(item["phi"])
            psi = field_from_json(item["psi"])
            norm = norm_from_json(item["norm"]) if "norm" in item else Euclidean()
            rows = growth_profile(phi, psi, norm, [float(r) for r in item["radii"]], cfg)
            out["result"] = {"rows": [{"r": r, "sup": v} for r, v in rows]}
            if "bound" in item:
                out["ok"] = all(v <= float(item["bound"]) + 1e-9 for _, v in rows)
            else:
                out["ok"] = all(b >= a - 1e-12 for (_, a), (_, b) in zip(rows, rows[1:]))
        elif check == "projection_minorant":
            phi = field_from_json(item["phi"])
            ok, violation = projection_minorant_check(
                phi, int(item["N"]), int(item["m"]),
                samples=int(item.get("samples", 1000)), seed=seed,
                radius=float(item.get("radius", 3.0)))
            out["result"] = {"passed": ok, "max_violation": violation}
            out["ok"] = ok
        elif check == "functional_zero":
            psi = field_from_json(item["psi"])
            A = np.asarray(item["A"], dtype=float)
            tol = float(item.get("tol", 1e-6))
            x = find_functional_zero(psi, A, cfg, tol=tol)
            resid = float(np.linalg.norm(A @ psi(x))) if A.size else 0.0
            out["result"] = {"x": x.tolist(), "residual": resid}
            out["ok"] = resid <= tol
        else:  # pragma: no cover - guarded by validation
            raise InputError(f"unknown check {check!r}")
    except ConvergenceError as exc:
        out["result"] = {"error": str(exc), "residual": exc.residual}
        out["ok"] = False
    except InputError as exc:
        # Value-level problems (e.g. a negative radius) surface per item; the
        # campaign itself never aborts on them.
        out["result"] = {"error": str(exc)}
        out["ok"] = False
    return out


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(raw: dict) -> str:
    return hashlib.sha256(_canonical(raw).encode()).hexdigest()


def run_campaign(config_path, out_path=None):
    """Execute a campaign config; returns the written report path.

    Exit-status semantics surface through `report['aggregate']`: callers map
    `violated_nonvanishing > 0` to exit code 3.
    """
    config_path = Path(config_path)
    raw = json.loads(config_path.read_text())
    cfg = CampaignConfig.from_dict(raw)
    out_path = Path(out_path) if out_path else config_path.with_suffix(".report.json")

    workers = max(int(os.environ.get("HSDL_THREADS", "1")), 1)
    if workers > 1 and len(cfg.items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            items = list(pool.map(lambda pair: _run_item(pair[0], pair[1], cfg.seed),
                                  enumerate(cfg.items)))
    else:
        items = [_run_item(i, item, cfg.seed) for i, item in enumerate(cfg.items)]

    verdicts = {}
    violated_nonvanishing = 0
    for rec, item in zip(items, cfg.items):
        verdict = (rec.get("result") or {}).get("verdict")
        if verdict:
            verdicts[verdict] = verdicts.get(verdict, 0) + 1
            if (verdict == NUMERICALLY_VIOLATED and _claimed(item)
                    and rec["check"] != "sharpness"):
                violated_nonvanishing += 1

    import numpy as _np
    import scipy as _sp

    report = {
        "campaign": cfg.campaign,
        "seed": cfg.seed,
        "config_hash": config_hash(raw),
        "versions": {"hsdl": __version__, "numpy": _np.__version__, "scipy": _sp.__version__},
        "items": items,
        "aggregate": {
            "items": len(items),
            "ok": sum(1 for rec in items if rec.get("ok")),
            "verdicts": verdicts,
            "violated_nonvanishing": violated_nonvanishing,
        },
    }
    report["report_hash"] = hashlib.sha256(_canonical(report).encode()).hexdigest()
    from datetime import datetime, timezone

    report["generated_at"] = datetime.now(timezone.utc).isoformat()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_side_tables(report, out_path)
    return out_path


def _write_side_tables(report, out_path: Path):
    stem = out_path.with_suffix("")
    for rec in report["items"]:
        rows = (rec.get("result") or {}).get("rows")
        if not rows:
            continue
        table_path = Path(f"{stem}.item{rec['index']}.{rec['check']}.csv")
        with table_path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)


def report_hash_of(report: dict) -> str:
    """Recompute the content hash of a report (timestamp and hash excluded)."""
    scrubbed = {k: v for k, v in report.items() if k not in ("generated_at", "report_hash")}
    return hashlib.sha256(_canonical(scrubbed).encode()).hexdigest()


def render_plot(report_path, plot_kind: str, out_path):
    """Emit a standalone SVG for one of the three plot kinds."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    report = json.loads(Path(report_path).read_text())
    out_path = Path(out_path)
    items = report.get("items", [])

    if plot_kind == "rotation_sweep":
        recs = [r for r in items if r["check"] == "rotation_sweep" and r.get("result", {}).get("rows")]
        if not recs:
            raise InputError("report has no rotation_sweep rows")
        rows = recs[0]["result"]["rows"]
        alphas = [r["alpha"] for r in rows]
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(alphas, [r["d_estimate"] for r in rows], "o", label="estimated sup displacement")
        ax.plot(alphas, [r["d_closed_form"] for r in rows], "-", label="2 sin(|alpha|/2)")
        ax.axhline(1.0, color="gray", ls="--", label="gamma = 1")
        for sign, gid in ((1, "alpha-crossing-pos"), (-1, "alpha-crossing-neg")):
            line = ax.axvline(sign * math.pi / 3, color="crimson", ls=":", lw=1.2)
            line.set_gid(gid)
        ax.set_xlabel("alpha")
        ax.set_ylabel("displacement")
        ax.legend(loc="upper center")
        ax.set_title("Rotation family: three regimes")
    elif plot_kind == "growth_profile":
        recs = [r for r in items if r["check"] == "growth_profile" and r.get("result", {}).get("rows")]
        if not recs:
            raise InputError("report has no growth_profile rows")
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for rec in recs:
            rows = rec["result"]["rows"]
            ax.plot([r["r"] for r in rows], [r["sup"] for r in rows],
                    "o-", label=f"item {rec['index']}")
        ax.set_xlabel("ball radius")
        ax.set_ylabel("sup dual-norm gap")
        ax.set_xscale("log")
        ax.legend()
        ax.set_title("Growth vs uniform boundedness")
    elif plot_kind == "slack_histogram":
        slacks = [rec["result"]["slack"] for rec in items
                  if isinstance(rec.get("result"), dict) and "slack" in rec["result"]]
        if not slacks:
            raise InputError("report has no slack values to plot")
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.hist(slacks, bins=max(10, int(np.sqrt(len(slacks)))), color="steelblue")
        ax.set_xlabel("slack")
        ax.set_ylabel("count")
        ax.set_title("Slack distribution")
    else:
        raise InputError(f"unknown plot kind {plot_kind!r}")

    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path
