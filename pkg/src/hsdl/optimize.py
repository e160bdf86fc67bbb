"""Batched multistart local search used by the estimators.

The search maximizes (or minimizes) a batch objective over a convex body or
the unit sphere.  Starts are processed in blocks of 64; within a block every
start is refined independently (projected gradient for smooth objectives,
compass probes for kinked ones) and the block's best few candidates get a
derivative-free polish.  Start generation is prefix-stable in the budget, so
enlarging the budget can only add candidate points: estimates are monotone in
the budget by construction.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .sampling import sphere_directions

_BLOCK = 64


@dataclass(frozen=True)
class SearchBudget:
    """Knobs of the multistart search."""

    multistarts: int = 128
    max_iters: int = 500
    seed: int = 0
    polish: bool = True
    polish_top: int = 4


@dataclass(frozen=True)
class SearchResult:
    point: np.ndarray
    value: float
    starts_used: int


def _compass_directions(n: int) -> np.ndarray:
    """Axis and pair-diagonal probe directions (plus fixed extras in high dim)."""
    eye = np.eye(n)
    dirs = [eye, -eye]
    if n <= 6:
        diag = []
        for i in range(n):
            for j in range(i + 1, n):
                for si in (1.0, -1.0):
                    for sj in (1.0, -1.0):
                        d = si * eye[i] + sj * eye[j]
                        diag.append(d / np.sqrt(2.0))
        if diag:
            dirs.append(np.array(diag))
    else:
        extra = sphere_directions(32, n, seed=0)
        dirs.extend([extra, -extra])
    return np.vstack(dirs)


def _pg_phase(f, project, X, vals, scale, iters):
    """Projected finite-difference gradient ascent with adaptive steps."""
    k, n = X.shape
    h = 1e-7 * scale
    step = np.full(k, 0.2 * scale)
    for _ in range(iters):
        G = np.empty_like(X)
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            G[:, i] = (f(X + e) - f(X - e)) / (2.0 * h)
        gn = np.linalg.norm(G, axis=1)
        gn[gn == 0.0] = 1.0
        C = project(X + (step / gn)[:, None] * G)
        cv = f(C)
        better = cv > vals
        X[better] = C[better]
        vals[better] = cv[better]
        step[better] *= 1.5
        step[~better] *= 0.4
        if step.max() < 1e-11 * scale:
            break
    return X, vals


def _compass_phase(f, project, X, vals, scale, iters, dirs):
    """Pattern search over a fixed positive spanning probe set."""
    k = X.shape[0]
    h = np.full(k, 0.1 * scale)
    for _ in range(iters):
        improved = np.zeros(k, dtype=bool)
        for d in dirs:
            C = project(X + h[:, None] * d)
            cv = f(C)
            better = cv > vals
            if better.any():
                X[better] = C[better]
                vals[better] = cv[better]
                improved |= better
        h[~improved] *= 0.5
        if h.max() < 1e-13 * max(scale, 1.0):
            break
    return X, vals


def _polish(f, project, x0):
    def neg(z):
        return -float(f(project(z[None, :]))[0])

    res = minimize(neg, x0, method="Powell",
                   options={"xtol": 1e-12, "ftol": 1e-14, "maxfev": 4000})
    z = project(res.x[None, :])[0]
    return z, float(f(z[None, :])[0])


def extremize(objective, project, starts, mode="max", smooth=True,
              max_iters=500, polish=True, polish_top=4):
    """Multistart extremization of `objective` over `project`'s feasible set.

    objective: (k,n) -> (k,) batch evaluator.
    project:   (k,n) -> (k,n) Euclidean projection onto the feasible set.
    starts:    (k,n) initial points (already feasible).
    Returns the best point found, its objective value and the start count.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    sign = 1.0 if mode == "max" else -1.0

    def f(X):
        return sign * np.asarray(objective(X), dtype=float)

    scale = max(1.0, float(np.max(np.linalg.norm(starts, axis=1), initial=0.0)))
    dirs = _compass_directions(starts.shape[1])

    best_x = None
    best_v = -np.inf
    for lo in range(0, starts.shape[0], _BLOCK):
        X = starts[lo:lo + _BLOCK].copy()
        vals = f(X)
        if smooth:
            X, vals = _pg_phase(f, project, X, vals, scale, max(1, (2 * max_iters) // 5))
            X, vals = _compass_phase(f, project, X, vals, scale, max(1, (3 * max_iters) // 5), dirs)
        else:
            X, vals = _compass_phase(f, project, X, vals, scale, max_iters, dirs)
        order = np.argsort(-vals, kind="stable")
        if polish:
            for idx in order[:polish_top]:
                z, v = _polish(f, project, X[idx])
                if v > vals[idx]:
                    X[idx] = z
                    vals[idx] = v
        j = int(np.argmax(vals))
        if vals[j] > best_v:
            best_v = float(vals[j])
            best_x = X[j].copy()
    return SearchResult(point=best_x, value=sign * best_v, starts_used=starts.shape[0])


def body_start_points(body, count, seed):
    """Deterministic start set: origin (or deepest point), any vertices, then
    alternating boundary / pulled-inward points. Prefix-stable in `count`."""
    n = body.dimension
    fixed = [body._interior_base().reshape(1, n)]
    vertices = getattr(body, "vertices", None)
    if vertices is not None:
        fixed.append(np.asarray(vertices, dtype=float))
    fixed = np.vstack(fixed)
    n_samples = max(count - 1, 2)
    nb = (n_samples + 1) // 2
    ni = n_samples - nb
    boundary = body.boundary_sample(nb, seed)
    interior = body.interior_sample(max(ni, 1), seed + 1)
    inter = np.empty((nb + ni, n))
    inter[0::2] = boundary[: nb]
    if ni:
        inter[1::2] = interior[:ni]
    return np.vstack([fixed, inter])


def extremize_over_body(objective, body, mode="max", smooth=True, budget=None,
                        extra_starts=None):
    budget = budget or SearchBudget()
    starts = body_start_points(body, budget.multistarts, budget.seed)
    if extra_starts is not None and len(extra_starts):
        starts = np.vstack([np.atleast_2d(np.asarray(extra_starts, dtype=float)), starts])
    starts = body.project_batch(starts)
    return extremize(objective, body.project_batch, starts, mode=mode, smooth=smooth,
                     max_iters=budget.max_iters, polish=budget.polish,
                     polish_top=budget.polish_top)


def extremize_on_sphere(objective, dim, mode="max", smooth=True, budget=None):
    """Extremize over the Euclidean unit sphere (retraction = renormalization)."""
    budget = budget or SearchBudget(multistarts=64)

    def project(X):
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        out = np.divide(X, norms, out=np.zeros_like(X), where=norms > 0)
        degenerate = norms[:, 0] == 0.0
        if degenerate.any():
            out[degenerate, 0] = 1.0  # arbitrary unit vector for the origin
        return out

    if dim == 1:
        pts = np.array([[1.0], [-1.0]])
        vals = np.asarray(objective(pts), dtype=float)
        j = int(np.argmax(vals)) if mode == "max" else int(np.argmin(vals))
        return SearchResult(point=pts[j], value=float(vals[j]), starts_used=2)

    starts = sphere_directions(budget.multistarts, dim, budget.seed)
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    diag = np.ones(dim) / np.sqrt(dim)
    starts = np.vstack([axes, diag[None, :], -diag[None, :], starts])
    return extremize(objective, project, starts, mode=mode, smooth=smooth,
                     max_iters=budget.max_iters, polish=budget.polish,
                     polish_top=budget.polish_top)
