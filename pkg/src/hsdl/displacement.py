"""Displacement estimators and the lower-bound verification reports.

The two primitives are one-sided by construction: the sampled supremum of
||f(x) - x|| is a certified lower bound of the true supremum (the witness is
feasible), and the sampled infimum of ||f(x)|| is a certified upper bound of
the true infimum.  Consequently a nonnegative numeric slack implies the true
inequality holds, while a negative slack on a genuinely nonvanishing field
can only mean estimator shortfall, never a counterexample.
"""

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.optimize import least_squares, minimize

from .errors import ConvergenceError, InputError, PreconditionError
from .fields import BoundaryTranslate, Scaled, Translation, VectorField
from .geometry import Ball, ConvexBody
from .norms import Euclidean, Norm, equivalence_constants
from .optimize import SearchBudget, extremize_over_body
from .sampling import sphere_directions

HOLDS = "holds"
HOLDS_WITH_EQUALITY = "holds_with_equality"
NUMERICALLY_VIOLATED = "numerically_violated"

KIND_THM22 = "unit_ball_thm22"
KIND_THM31 = "euclidean_thm31"
KIND_THM35 = "star_thm35"
KIND_COR36 = "nu_cor36"
KIND_THM42 = "eigen_thm42"
KIND_ALPHA = "alpha_thm34"

_VANISH_TOL = 1e-9
_EQ_TOL = 1e-6

_SAFE_DIRECTION_NOTE = (
    "sampled sup underestimates and sampled inf overestimates: numeric slack >= 0 "
    "implies the true inequality; a violation on a nonvanishing field indicates "
    "estimator shortfall only"
)


@dataclass(frozen=True)
class DisplacementEstimate:
    value: float
    witness: np.ndarray
    mode: str  # "sup_lower_bound" | "inf_upper_bound"
    samples_used: int
    gap_bound: Optional[float] = None

    def to_json(self) -> dict:
        out = {"value": self.value, "witness": self.witness.tolist(),
               "mode": self.mode, "samples_used": self.samples_used}
        if self.gap_bound is not None:
            out["gap_bound"] = self.gap_bound
        return out


@dataclass(frozen=True)
class BoundReport:
    bound_kind: str
    d_hat: DisplacementEstimate
    inf_hat: DisplacementEstimate
    r: float
    r1: float
    theta: tuple
    nu: float
    rhs: float
    slack: float
    verdict: str
    hypothesis_not_met: bool
    eq_tol: float = _EQ_TOL
    mu: Optional[float] = None
    reduced_value: Optional[float] = None
    alpha: Optional[float] = None
    inputs: dict = dc_field(default_factory=dict, repr=False)
    note: str = _SAFE_DIRECTION_NOTE

    def to_json(self) -> dict:
        out = {
            "bound_kind": self.bound_kind,
            "d_hat": self.d_hat.to_json(),
            "inf_hat": self.inf_hat.to_json(),
            "r": self.r,
            "r1": self.r1,
            "theta": list(self.theta),
            "nu": self.nu,
            "rhs": self.rhs,
            "slack": self.slack,
            "verdict": self.verdict,
            "hypothesis_not_met": self.hypothesis_not_met,
            "eq_tol": self.eq_tol,
            "note": self.note,
        }
        if self.mu is not None:
            out["mu"] = self.mu
        if self.reduced_value is not None:
            out["reduced_value"] = self.reduced_value
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.inputs:
            out["inputs"] = self.inputs
        return out


def _check_dims(field: VectorField, body: ConvexBody, norm: Norm):
    if field.dimension != body.dimension:
        raise InputError("field and body dimensions disagree")
    if norm.dimension is not None and norm.dimension != body.dimension:
        raise InputError("norm dimension disagrees with the body")


def _field_smooth(field: VectorField) -> bool:
    from .fields import (Custom, DisplacementForm, KakutaniShift,
                         RadialExtension, SubspaceSplit)

    if isinstance(field, (KakutaniShift, RadialExtension, DisplacementForm)):
        return False
    if isinstance(field, SubspaceSplit):
        return _field_smooth(field.inner_f)
    if isinstance(field, Scaled):
        return _field_smooth(field.inner)
    if isinstance(field, Custom):
        return False
    return True


def _gap_bound(field, body, norm, cfg, objective_lip):
    """L * covering-radius certificate; only when a Lipschitz bound is declared."""
    if field.lipschitz_estimate is None:
        return None
    seeds = body.boundary_sample(max(cfg.multistarts // 2, 8), cfg.seed)
    probes = np.vstack([
        body.boundary_sample(256, cfg.seed + 77),
        body.interior_sample(256, cfg.seed + 78),
    ])
    d2 = np.sum(probes**2, axis=1)[:, None] - 2.0 * probes @ seeds.T + np.sum(seeds**2, axis=1)
    covering = float(np.sqrt(np.maximum(d2.min(axis=1), 0.0).max()))
    return objective_lip * covering


def sup_displacement(field: VectorField, body: ConvexBody, norm: Optional[Norm] = None,
                     cfg: Optional[SearchBudget] = None) -> DisplacementEstimate:
    """Certified lower bound of sup_{x in K} ||f(x) - x|| in the given norm."""
    norm = norm or Euclidean()
    cfg = cfg or SearchBudget()
    _check_dims(field, body, norm)

    def objective(X):
        return norm.eval_batch(field.eval_batch(X) - X)

    smooth = norm.is_smooth and _field_smooth(field)
    res = extremize_over_body(objective, body, mode="max", smooth=smooth, budget=cfg)
    t1, _ = equivalence_constants(norm, dim=body.dimension)
    lip = None if field.lipschitz_estimate is None else (field.lipschitz_estimate + 1.0) / t1
    gap = _gap_bound(field, body, norm, cfg, lip) if lip is not None else None
    return DisplacementEstimate(value=res.value, witness=res.point, mode="sup_lower_bound",
                                samples_used=res.starts_used, gap_bound=gap)


def inf_norm(field: VectorField, body: ConvexBody, norm: Optional[Norm] = None,
             cfg: Optional[SearchBudget] = None) -> DisplacementEstimate:
    """Certified upper bound of inf_{x in K} ||f(x)|| in the given norm."""
    norm = norm or Euclidean()
    cfg = cfg or SearchBudget()
    _check_dims(field, body, norm)

    def objective(X):
        return norm.eval_batch(field.eval_batch(X))

    smooth = norm.is_smooth and _field_smooth(field)
    res = extremize_over_body(objective, body, mode="min", smooth=smooth, budget=cfg)
    t1, _ = equivalence_constants(norm, dim=body.dimension)
    lip = None if field.lipschitz_estimate is None else field.lipschitz_estimate / t1
    gap = _gap_bound(field, body, norm, cfg, lip) if lip is not None else None
    return DisplacementEstimate(value=res.value, witness=res.point, mode="inf_upper_bound",
                                samples_used=res.starts_used, gap_bound=gap)


def _verdict(slack, eq_tol):
    if abs(slack) <= eq_tol:
        return HOLDS_WITH_EQUALITY
    return HOLDS if slack > 0 else NUMERICALLY_VIOLATED


def _is_unit_ball(body) -> bool:
    return (isinstance(body, Ball) and abs(body.radius - 1.0) <= 1e-12
            and np.linalg.norm(body.center) <= 1e-12)


def check_lower_bound(field: VectorField, body: ConvexBody, norm: Optional[Norm] = None,
                      bound_kind: str = KIND_THM31, cfg: Optional[SearchBudget] = None,
                      eq_tol: float = _EQ_TOL) -> BoundReport:
    """Assemble and check one displacement lower bound.

    Kinds: unit_ball_thm22 (gamma bound on the unit ball), euclidean_thm31
    (inradius bound), star_thm35 (rescaled-norm bound), nu_cor36 (uniform
    constant bound).
    """
    cfg = cfg or SearchBudget()
    if bound_kind in (KIND_THM22, KIND_THM31):
        norm = Euclidean()
    elif norm is None:
        raise InputError(f"bound kind {bound_kind} needs an explicit norm")

    if bound_kind == KIND_THM22:
        if not _is_unit_ball(body):
            raise PreconditionError("unit_ball_thm22 applies to the unit ball at the origin")
        r = 1.0
    elif bound_kind in (KIND_THM31, KIND_THM35, KIND_COR36):
        body.require_origin_interior()
        r = body.inradius()
    else:
        raise InputError(f"unknown bound kind {bound_kind!r}")

    r1 = body.circumradius_estimate(seed=cfg.seed).value
    theta = equivalence_constants(norm, dim=body.dimension)
    nu = min(1.0 / theta[1], theta[0] / theta[1])

    d_hat = sup_displacement(field, body, norm, cfg)
    inf_hat = inf_norm(field, body, norm, cfg)

    if bound_kind == KIND_THM22:
        rhs = 1.0 + inf_hat.value
    elif bound_kind == KIND_THM31:
        rhs = r + inf_hat.value
    elif bound_kind == KIND_THM35:
        rhs = r / theta[1] + (theta[0] / theta[1]) * inf_hat.value
    else:  # nu_cor36
        rhs = nu * (r + inf_hat.value)

    slack = d_hat.value - rhs
    inputs = {"body": body.to_json(), "norm": norm.to_json()}
    try:
        inputs["field"] = field.to_json()
    except InputError:
        inputs["field"] = {"kind": "custom"}
    return BoundReport(
        bound_kind=bound_kind, d_hat=d_hat, inf_hat=inf_hat, r=r, r1=r1,
        theta=theta, nu=nu, rhs=rhs, slack=slack,
        verdict=_verdict(slack, eq_tol),
        hypothesis_not_met=inf_hat.value <= _VANISH_TOL,
        eq_tol=eq_tol, inputs=inputs)


def check_eigen_bound(field: VectorField, mu: float, cfg: Optional[SearchBudget] = None,
                      eq_tol: float = _EQ_TOL) -> BoundReport:
    """Bound sup ||f(x) - mu x|| >= mu + inf ||f(x)|| on the unit ball.

    Computed twice: directly, and through the scaled-field reduction
    (sup ||f/mu - x|| times mu); the two must agree to estimator accuracy.
    """
    if not (mu > 0):
        raise InputError("mu must be positive")
    cfg = cfg or SearchBudget()
    body = Ball(np.zeros(field.dimension), 1.0)
    norm = Euclidean()

    def objective(X):
        return np.linalg.norm(field.eval_batch(X) - mu * X, axis=1)

    smooth = _field_smooth(field)
    res = extremize_over_body(objective, body, mode="max", smooth=smooth, budget=cfg)
    d_hat = DisplacementEstimate(value=res.value, witness=res.point,
                                 mode="sup_lower_bound", samples_used=res.starts_used)
    reduced = mu * sup_displacement(Scaled(field, mu), body, norm, cfg).value
    inf_hat = inf_norm(field, body, norm, cfg)
    rhs = mu + inf_hat.value
    slack = d_hat.value - rhs
    inputs = {"body": body.to_json(), "norm": norm.to_json()}
    try:
        inputs["field"] = field.to_json()
    except InputError:
        inputs["field"] = {"kind": "custom"}
    return BoundReport(
        bound_kind=KIND_THM42, d_hat=d_hat, inf_hat=inf_hat, r=1.0, r1=1.0,
        theta=(1.0, 1.0), nu=1.0, rhs=rhs, slack=slack,
        verdict=_verdict(slack, eq_tol),
        hypothesis_not_met=inf_hat.value <= _VANISH_TOL,
        eq_tol=eq_tol, mu=mu, reduced_value=reduced, inputs=inputs)


def sharpness_witness(body: ConvexBody, alpha: float, eps: float = 0.1,
                      cfg: Optional[SearchBudget] = None):
    """Construct a nonvanishing field violating the alpha-strengthened bound.

    For alpha above the circumradius: a translation by a vector of norm alpha.
    For alpha between the inradius and circumradius: translation just past the
    minimum-norm boundary point.  No witness exists for alpha <= inradius,
    where the strengthened inequality is a theorem.
    """
    cfg = cfg or SearchBudget()
    body.require_origin_interior()
    r = body.inradius()
    if alpha <= r:
        raise InputError(f"alpha={alpha} <= inradius={r}: the bound holds, no witness exists")
    if not (eps > 0):
        raise InputError("eps must be positive")
    r1_est = body.circumradius_estimate(seed=cfg.seed)

    if alpha > r1_est.value:
        xprime = np.zeros(body.dimension)
        xprime[0] = alpha
        field = Translation(xprime, claimed_nonvanishing=True)
    else:
        xprime, _ = body.min_norm_boundary_point()
        field = BoundaryTranslate(xprime, eps, claimed_nonvanishing=True)

    d_hat = sup_displacement(field, body, None, cfg)
    inf_hat = inf_norm(field, body, None, cfg)
    rhs = alpha + inf_hat.value
    slack = d_hat.value - rhs
    report = BoundReport(
        bound_kind=KIND_ALPHA, d_hat=d_hat, inf_hat=inf_hat, r=r, r1=r1_est.value,
        theta=(1.0, 1.0), nu=1.0, rhs=rhs, slack=slack,
        verdict=_verdict(slack, _EQ_TOL),
        hypothesis_not_met=inf_hat.value <= _VANISH_TOL,
        alpha=alpha,
        inputs={"body": body.to_json(), "field": field.to_json()})
    return field, report


def projection_minorant_check(phi: VectorField, N: int, m: int, samples: int = 1000,
                              seed: int = 0, radius: float = 3.0):
    """Pointwise splitting identity along the first m coordinates.

    For x in the subspace F spanned by the first m coordinates,
    ||phi(x) - x||^2 must equal ||P1 phi(x) - x||^2 + ||P2 phi(x)||^2 exactly,
    and in particular ||phi(x) - x|| >= ||P1 phi(x) - x||.  Returns
    (ok, max_violation) over the sample.
    """
    if not (1 <= m <= N):
        raise InputError("need 1 <= m <= N")
    if phi.dimension != N:
        raise InputError("phi must act on R^N")
    dirs = sphere_directions(samples, m, seed)
    radii = np.linspace(0.0, radius, samples)[:, None]
    X = np.zeros((samples, N))
    X[:, :m] = dirs * radii
    V = phi.eval_batch(X)
    diff = V - X
    lhs_sq = np.sum(diff**2, axis=1)
    p1_sq = np.sum((V[:, :m] - X[:, :m]) ** 2, axis=1)
    p2_sq = np.sum(V[:, m:] ** 2, axis=1)
    identity_violation = np.max(np.abs(lhs_sq - (p1_sq + p2_sq)))
    minorant_violation = np.max(np.maximum(np.sqrt(p1_sq) - np.sqrt(lhs_sq), 0.0))
    max_violation = float(max(identity_violation, minorant_violation))
    return max_violation <= 1e-10, max_violation


def growth_profile(phi: VectorField, psi: VectorField, norm: Optional[Norm] = None,
                   radii=(1.0, 5.0, 50.0), cfg: Optional[SearchBudget] = None):
    """Dual-norm gap sup_{||y|| <= r} ||phi(y) - psi(y)||_dual per radius.

    Each radius reuses the previous witness as a start, so the profile is
    nondecreasing by construction (nested balls).
    """
    norm = norm or Euclidean()
    cfg = cfg or SearchBudget()
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])) or any(r <= 0 for r in radii):
        raise InputError("radii must be positive and strictly increasing")
    if phi.dimension != psi.dimension:
        raise InputError("phi and psi dimensions disagree")
    n = phi.dimension

    def objective(X):
        return norm.dual_eval_batch(phi.eval_batch(X) - psi.eval_batch(X))

    smooth = norm.is_smooth and _field_smooth(phi) and _field_smooth(psi)
    rows = []
    prev_witness = None
    for r in radii:
        body = Ball(np.zeros(n), r)
        extra = None if prev_witness is None else prev_witness[None, :]
        res = extremize_over_body(objective, body, mode="max", smooth=smooth,
                                  budget=cfg, extra_starts=extra)
        value = res.value
        if rows and value < rows[-1][1]:
            value = rows[-1][1]  # witness carried over stays feasible
        rows.append((r, value))
        prev_witness = res.point
    return rows


def find_functional_zero(psi: VectorField, A, cfg: Optional[SearchBudget] = None,
                         tol: float = 1e-6) -> np.ndarray:
    """Find x with A psi(x) = 0 (componentwise functionals killed at once).

    Minimizes ||A psi(x)||^2 by damped least squares from multistarts over
    expanding balls (radius doubling on failure).  A bounded-displacement psi
    guarantees existence in the idealized setting; budget exhaustion raises
    with the best iterate.
    """
    cfg = cfg or SearchBudget()
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = psi.dimension
    if A.size == 0 or A.shape[0] == 0:
        return np.zeros(n)
    if A.shape[1] != n:
        raise InputError("A must have one column per coordinate of psi")

    def residual(x):
        return A @ psi(x)

    def merit(x):
        v = residual(x)
        return float(v @ v)

    best_x, best_v = np.zeros(n), merit(np.zeros(n))
    radius = 1.0
    for _ in range(7):
        starts = radius * sphere_directions(12, n, cfg.seed) * np.linspace(0.2, 1.0, 12)[:, None]
        starts = np.vstack([np.zeros((1, n)), starts])
        for x0 in starts:
            try:
                res = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
                cand, cv = res.x, float(res.fun @ res.fun)
            except Exception:
                cand, cv = x0, merit(x0)
            if cv < best_v:
                best_x, best_v = cand, cv
            if best_v <= (tol * 1e-3) ** 2:
                return best_x
        if np.sqrt(best_v) <= tol:
            return best_x
        radius *= 2.0
    # Derivative-free fallback before giving up.
    res = minimize(merit, best_x, method="Nelder-Mead",
                   options={"xatol": 1e-14, "fatol": 1e-24, "maxiter": 5000})
    if merit(res.x) < best_v:
        best_x, best_v = res.x, merit(res.x)
    if np.sqrt(best_v) <= tol:
        return best_x
    raise ConvergenceError("functional-zero search exhausted its budget",
                           best=best_x, residual=float(np.sqrt(best_v)))
