"""Variational-inequality solver on compact convex bodies.

Solves: find xbar in K with <f(xbar), y - xbar> >= 0 for all y in K.  The
merit function is the natural residual ||x - P_K(x - tau f(x))||, which
vanishes exactly at solutions.  The primary iteration is an extragradient
method with adaptive step halving; a multistart derivative-free minimization
of the squared residual covers fields the extragradient cannot handle.
Existence on a compact convex body is guaranteed for continuous fields, so a
budget-exhaustion failure always signals a solver limitation.
"""

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError, InputError
from .fields import VectorField
from .geometry import Ball, ConvexBody, HPolytope

INTERIOR_ZERO = "interior_zero"
BOUNDARY_INWARD_NORMAL = "boundary_inward_normal"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class VIProblem:
    body: ConvexBody
    field: VectorField

    def __post_init__(self):
        if self.body.dimension != self.field.dimension:
            raise InputError("body and field dimensions disagree")


@dataclass(frozen=True)
class SolveConfig:
    tau0: Optional[float] = None
    eps_res: float = 1e-8
    max_iter: int = 100_000
    multistarts: int = 16
    seed: int = 0
    class_tol: float = 1e-6


@dataclass(frozen=True)
class VISolution:
    x: np.ndarray
    residual: float
    lam: Optional[float]
    classification: str
    evidence_y: np.ndarray = dc_field(repr=False)
    evidence_values: np.ndarray = dc_field(repr=False)
    active_constraints: Optional[list] = None

    def to_json(self) -> dict:
        out = {
            "x": self.x.tolist(),
            "residual": self.residual,
            "lambda": self.lam,
            "classification": self.classification,
            "evidence_min": float(self.evidence_values.min()) if self.evidence_values.size else None,
            "evidence_count": int(self.evidence_values.size),
        }
        if self.active_constraints is not None:
            out["active_constraints"] = self.active_constraints
        return out


def natural_residual(problem: VIProblem, x, tau: float = 1.0) -> float:
    """||x - P_K(x - tau f(x))||; zero exactly at VI solutions."""
    if not (tau > 0):
        raise InputError("tau must be positive")
    x = np.asarray(x, dtype=float).reshape(-1)
    if not problem.body.contains(x, 1e-7):
        raise InputError("natural_residual requires x in the body")
    fx = problem.field(x)
    return float(np.linalg.norm(x - problem.body.project(x - tau * fx)))


def _residual_tau1(problem, x):
    fx = problem.field(x)
    return float(np.linalg.norm(x - problem.body.project(x - fx)))


def _extragradient(problem, x0, tau, eps_res, max_iter):
    body, f = problem.body, problem.field
    x = body.project(x0)
    best_x, best_r = x, _residual_tau1(problem, x)
    prev_r = best_r
    for _ in range(max_iter):
        if best_r <= eps_res:
            break
        fx = f(x)
        y = body.project(x - tau * fx)
        x = body.project(x - tau * f(y))
        r = _residual_tau1(problem, x)
        if r < best_r:
            best_x, best_r = x, r
        if r > prev_r:
            tau = max(tau * 0.5, 1e-12)
        prev_r = r
    return best_x, best_r


def _default_tau(field: VectorField) -> float:
    if field.lipschitz_estimate is not None:
        return 1.0 / (1.0 + field.lipschitz_estimate)
    return 0.1


def _evidence(problem, x, seed, count=1000):
    body = problem.body
    nb = count // 2
    Y = np.vstack([
        body.boundary_sample(nb, seed + 101),
        body.interior_sample(count - nb, seed + 202),
    ])
    fx = problem.field(x)
    vals = (Y - x) @ fx
    return Y, vals


def solve(problem: VIProblem, cfg: Optional[SolveConfig] = None) -> VISolution:
    """Multistart extragradient solve; returns the minimal-residual iterate.

    Raises ConvergenceError (carrying the best iterate) when every start and
    the derivative-free fallback finish above cfg.eps_res.
    """
    cfg = cfg or SolveConfig()
    body, f = problem.body, problem.field
    tau = cfg.tau0 if cfg.tau0 is not None else _default_tau(f)

    starts = [body._interior_base()]
    if cfg.multistarts > 1:
        starts.extend(body.boundary_sample(cfg.multistarts - 1, cfg.seed))
    per_start = max(cfg.max_iter // max(cfg.multistarts, 1), 50)

    best_x, best_r = None, np.inf
    for x0 in starts:
        x, r = _extragradient(problem, x0, tau, cfg.eps_res, per_start)
        if r < best_r:
            best_x, best_r = x, r

    if best_r > cfg.eps_res:
        # Derivative-free fallback on the squared residual, feasible via
        # projection composition.
        def merit(z):
            p = body.project(z)
            return _residual_tau1(problem, p) ** 2

        for x0 in starts[:8]:
            res = minimize(merit, x0, method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-20, "maxiter": 4000})
            x = body.project(res.x)
            r = _residual_tau1(problem, x)
            if r < best_r:
                best_x, best_r = x, r
            if best_r <= cfg.eps_res:
                break

    if best_r > cfg.eps_res:
        raise ConvergenceError(
            "VI solve exhausted its budget (existence is guaranteed; this is a "
            "solver limitation, not nonexistence)", best=best_x, residual=best_r)

    Y, vals = _evidence(problem, best_x, cfg.seed)
    lam, classification, active = _classify_point(problem, best_x, cfg.class_tol)
    return VISolution(x=best_x, residual=best_r, lam=lam, classification=classification,
                      evidence_y=Y, evidence_values=vals, active_constraints=active)


def _classify_point(problem, x, class_tol):
    body, f = problem.body, problem.field
    fx = f(x)
    fnorm = float(np.linalg.norm(fx))
    if body.distance_to_boundary(x) > class_tol:
        if fnorm <= class_tol:
            return None, INTERIOR_ZERO, None
        return None, UNCLASSIFIED, None
    if isinstance(body, Ball):
        radial = x - body.center
        rn = float(np.linalg.norm(radial))
        if rn == 0.0:
            return None, UNCLASSIFIED, None
        n_hat = radial / rn
        fn = float(fx @ n_hat)
        collinearity = float(np.linalg.norm(fx - fn * n_hat))
        if collinearity <= class_tol and fn <= class_tol:
            lam = -fn / rn
            return lam, BOUNDARY_INWARD_NORMAL, None
        return None, UNCLASSIFIED, None
    if isinstance(body, HPolytope):
        return None, UNCLASSIFIED, body.active_constraints(x, class_tol)
    return None, UNCLASSIFIED, None


def classify(problem: VIProblem, sol: VISolution, class_tol: float = 1e-6) -> str:
    """Re-run the interior-zero / inward-normal dichotomy on a solution."""
    _, classification, _ = _classify_point(problem, sol.x, class_tol)
    return classification
