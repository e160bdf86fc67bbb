"""Norm descriptors, dual norms, and Euclidean-equivalence constants.

For a norm N the constants (theta1, theta2) are the extrema of 1/N(x) over
the Euclidean unit sphere; they give the tight sandwich

    theta1 * N(x) <= ||x||_2 <= theta2 * N(x)   for all x.

Closed forms cover the l^p family (including weighted p in {1,2,inf} and
linear pushforwards); everything else falls back to a multistart sphere
search that can also be forced for cross-checking.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import ConvergenceError, InputError
from .optimize import SearchBudget, extremize_on_sphere


def _dual_exponent(p: float) -> float:
    if p == 1.0:
        return np.inf
    if p == np.inf:
        return 1.0
    return p / (p - 1.0)


def _lp_batch(X: np.ndarray, p: float) -> np.ndarray:
    if p == np.inf:
        return np.max(np.abs(X), axis=1)
    if p == 1.0:
        return np.sum(np.abs(X), axis=1)
    if p == 2.0:
        return np.linalg.norm(X, axis=1)
    return np.sum(np.abs(X) ** p, axis=1) ** (1.0 / p)


class Norm:
    """Common interface of the norm variants."""

    kind: str
    dimension: Optional[int] = None
    is_smooth: bool = True

    def _check_dim(self, X):
        if self.dimension is not None and X.shape[-1] != self.dimension:
            raise InputError(f"{self.kind} norm is fixed to dimension {self.dimension}")

    def eval(self, x) -> float:
        x = np.asarray(x, dtype=float).reshape(-1)
        self._check_dim(x)
        return float(self.eval_batch(x[None, :])[0])

    def eval_batch(self, X) -> np.ndarray:
        raise NotImplementedError

    def dual_eval(self, xstar) -> float:
        xstar = np.asarray(xstar, dtype=float).reshape(-1)
        self._check_dim(xstar)
        return float(self.dual_eval_batch(xstar[None, :])[0])

    def dual_eval_batch(self, Xstar) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> float:
        return self.eval(x)

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Euclidean(Norm):
    dimension: Optional[int] = None
    kind = "euclidean"
    is_smooth = True

    def eval_batch(self, X):
        return np.linalg.norm(X, axis=1)

    def dual_eval_batch(self, Xstar):
        return np.linalg.norm(Xstar, axis=1)  # self-dual

    def to_json(self):
        return {"kind": "euclidean"}


@dataclass(frozen=True)
class Lp(Norm):
    p: float
    dimension: Optional[int] = None
    kind = "lp"

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):
            raise InputError("Lp norm needs p >= 1")
        object.__setattr__(self, "p", p)

    @property
    def is_smooth(self):
        return 1.0 < self.p < np.inf

    def eval_batch(self, X):
        return _lp_batch(np.asarray(X, dtype=float), self.p)

    def dual_eval_batch(self, Xstar):
        return _lp_batch(np.asarray(Xstar, dtype=float), _dual_exponent(self.p))

    def to_json(self):
        return {"kind": "lp", "p": "inf" if self.p == np.inf else self.p}


@dataclass(frozen=True)
class Weighted(Norm):
    """Weighted p-norm (sum_i w_i |x_i|^p)^(1/p); p = inf gives max_i w_i |x_i|."""

    w: np.ndarray
    p: float
    kind = "weighted"

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).reshape(-1)
        p = float(self.p)
        if np.any(w <= 0) or not np.isfinite(w).all():
            raise InputError("weights must be positive and finite")
        if not (p >= 1.0):
            raise InputError("weighted norm needs p >= 1")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dimension", w.shape[0])

    @property
    def is_smooth(self):
        return 1.0 < self.p < np.inf

    def _diag(self):
        # The norm equals ||D x||_p for this diagonal.
        if self.p == np.inf:
            return self.w
        return self.w ** (1.0 / self.p)

    def eval_batch(self, X):
        return _lp_batch(np.asarray(X, dtype=float) * self._diag(), self.p)

    def dual_eval_batch(self, Xstar):
        return _lp_batch(np.asarray(Xstar, dtype=float) / self._diag(), _dual_exponent(self.p))

    def to_json(self):
        return {"kind": "weighted", "w": self.w.tolist(), "p": "inf" if self.p == np.inf else self.p}


@dataclass(frozen=True)
class Polyhedral(Norm):
    """max_i |<d_i, x>| over a direction family spanning R^n."""

    directions: np.ndarray
    kind = "polyhedral"
    is_smooth = False

    def __post_init__(self):
        D = np.atleast_2d(np.asarray(self.directions, dtype=float))
        if np.any(np.linalg.norm(D, axis=1) == 0.0):
            raise InputError("polyhedral directions must be nonzero")
        if np.linalg.matrix_rank(D) < D.shape[1]:
            raise InputError("polyhedral directions must span R^n (norm would vanish)")
        D = D.copy()
        D.flags.writeable = False
        object.__setattr__(self, "directions", D)
        object.__setattr__(self, "dimension", D.shape[1])

    def eval_batch(self, X):
        return np.max(np.abs(np.asarray(X, dtype=float) @ self.directions.T), axis=1)

    def dual_eval_batch(self, Xstar):
        # Support function of the unit ball {x : |<d_i,x>| <= 1}: one LP per
        # query over the halfspace description (bounded because D spans R^n).
        Xstar = np.atleast_2d(np.asarray(Xstar, dtype=float))
        D = self.directions
        A_ub = np.vstack([D, -D])
        b_ub = np.ones(2 * D.shape[0])
        out = np.empty(Xstar.shape[0])
        for i, y in enumerate(Xstar):
            res = linprog(-y, A_ub=A_ub, b_ub=b_ub,
                          bounds=[(None, None)] * self.dimension, method="highs")
            if not res.success:
                raise ConvergenceError("dual-norm LP failed", best=None, residual=None)
            out[i] = -res.fun
        return out

    def to_json(self):
        return {"kind": "polyhedral", "directions": self.directions.tolist()}


@dataclass(frozen=True)
class Pushforward(Norm):
    """||g x||_2 for an invertible matrix g."""

    g: np.ndarray
    kind = "pushforward"
    is_smooth = True

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.g, dtype=float))
        if g.shape[0] != g.shape[1]:
            raise InputError("pushforward matrix must be square")
        svals = np.linalg.svd(g, compute_uv=False)
        if svals[-1] <= svals[0] * 1e-12:
            raise InputError("pushforward matrix must be invertible (condition estimate blew up)")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "dimension", g.shape[0])

    def eval_batch(self, X):
        return np.linalg.norm(np.asarray(X, dtype=float) @ self.g.T, axis=1)

    def dual_eval_batch(self, Xstar):
        ginv_t = np.linalg.inv(self.g).T
        return np.linalg.norm(np.asarray(Xstar, dtype=float) @ ginv_t.T, axis=1)

    def to_json(self):
        return {"kind": "pushforward", "g": self.g.tolist()}


def _require_dim(norm: Norm, dim: Optional[int]) -> int:
    n = norm.dimension if norm.dimension is not None else dim
    if n is None:
        raise InputError("dimension required (pass dim= or use a dimensioned norm)")
    if norm.dimension is not None and dim is not None and norm.dimension != dim:
        raise InputError("dim argument conflicts with the norm's dimension")
    return int(n)


def _sphere_extrema_closed_form(norm: Norm, n: int):
    """(min, max) of the norm over the Euclidean unit sphere, where known."""
    if isinstance(norm, Euclidean):
        return 1.0, 1.0
    if isinstance(norm, Lp):
        inv_p = 0.0 if norm.p == np.inf else 1.0 / norm.p
        v = n ** (inv_p - 0.5)  # value at the uniform diagonal direction
        return min(1.0, v), max(1.0, v)
    if isinstance(norm, Pushforward):
        svals = np.linalg.svd(norm.g, compute_uv=False)
        return float(svals[-1]), float(svals[0])
    if isinstance(norm, Weighted):
        w = norm.w
        if norm.p == 2.0:
            return float(np.sqrt(w.min())), float(np.sqrt(w.max()))
        if norm.p == 1.0:
            return float(w.min()), float(np.linalg.norm(w))
        if norm.p == np.inf:
            return float(1.0 / np.sqrt(np.sum(1.0 / w**2))), float(w.max())
    return None


def equivalence_constants(norm: Norm, dim: Optional[int] = None, method: str = "auto",
                          budget: Optional[SearchBudget] = None):
    """The sandwich constants (theta1, theta2) for `norm` against Euclidean.

    theta1 = min over the unit sphere of 1/N(x), theta2 = the max; closed
    forms are used where available unless method="optimize" forces the
    multistart sphere search.
    """
    n = _require_dim(norm, dim)
    if method not in ("auto", "optimize"):
        raise InputError("method must be 'auto' or 'optimize'")
    if method == "auto":
        closed = _sphere_extrema_closed_form(norm, n)
        if closed is not None:
            lo, hi = closed
            return 1.0 / hi, 1.0 / lo
    budget = budget or SearchBudget(multistarts=64)
    smooth = bool(norm.is_smooth)
    if isinstance(norm, Polyhedral) and method == "auto":
        # max over the sphere is attained along the longest direction.
        hi_val = float(np.max(np.linalg.norm(norm.directions, axis=1)))
    else:
        hi_val = extremize_on_sphere(norm.eval_batch, n, mode="max",
                                     smooth=smooth, budget=budget).value
    lo = extremize_on_sphere(norm.eval_batch, n, mode="min", smooth=smooth, budget=budget)
    return 1.0 / hi_val, 1.0 / lo.value


def nu_constant(norm: Norm, dim: Optional[int] = None) -> float:
    """min{1/theta2, theta1/theta2}: the uniform constant of the rescaled bound."""
    t1, t2 = equivalence_constants(norm, dim=dim)
    return min(1.0 / t2, t1 / t2)


def r_star(norm: Norm, r: float, dim: Optional[int] = None) -> float:
    """Radius rescaled into the target norm: r / theta2."""
    if not (r > 0):
        raise InputError("r must be positive")
    _, t2 = equivalence_constants(norm, dim=dim)
    return r / t2


def norm_from_json(obj: dict) -> Norm:
    """Build a norm from its JSON descriptor."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("norm descriptor must be an object with a 'kind' key")
    kind = obj["kind"]

    def _p(raw):
        return np.inf if raw in ("inf", "infinity", None) else float(raw)

    try:
        if kind == "euclidean":
            return Euclidean()
        if kind == "lp":
            return Lp(_p(obj["p"]))
        if kind == "weighted":
            return Weighted(np.asarray(obj["w"], dtype=float), _p(obj["p"]))
        if kind == "polyhedral":
            return Polyhedral(np.asarray(obj["directions"], dtype=float))
        if kind == "pushforward":
            return Pushforward(np.asarray(obj["g"], dtype=float))
    except KeyError as exc:
        raise InputError(f"norm descriptor missing key {exc}") from exc
    raise InputError(f"unknown norm kind {kind!r}")
