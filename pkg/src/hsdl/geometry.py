"""Compact convex bodies in R^n.

Three families are supported: Euclidean balls, bounded H-polytopes (with an
optional vertex list) and ellipsoids.  Each body answers membership and
Euclidean projection queries, knows its inradius (largest centered ball it
contains) and circumradius (largest point norm), can produce the minimum-norm
boundary point, and emits deterministic low-discrepancy boundary samples.

All descriptors are immutable; every operation is a pure function of the
descriptor and its arguments, so bodies can be shared freely across threads.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.optimize import brentq, linprog

from .errors import ConvergenceError, InputError, PreconditionError
from .quadratics import sphere_quadratic_max, sphere_quadratic_min
from .sampling import sphere_and_radius, sphere_directions

_DYKSTRA_TOL = 1e-12
_DYKSTRA_MAX_SWEEPS = 100_000
_ELLIPSOID_NEWTON_CAP = 100


@dataclass(frozen=True)
class RadiusEstimate:
    """Circumradius value with its witness; `lower_bound_only` marks estimates
    that are certified lower bounds rather than exact values."""

    value: float
    witness: np.ndarray
    lower_bound_only: bool = False


def _as_vector(x, n, what="point"):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise InputError(f"{what} has shape {x.shape}, expected ({n},)")
    return x


class ConvexBody:
    """Common interface of the body variants."""

    kind: str
    dimension: int

    # -- membership / projection -------------------------------------------

    def contains(self, x, tol: float = 0.0) -> bool:
        x = _as_vector(x, self.dimension)
        return bool(self._contains_batch(x[None, :], tol)[0])

    def contains_batch(self, X, tol: float = 0.0) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dimension:
            raise InputError("dimension mismatch in contains_batch")
        return self._contains_batch(X, tol)

    def project(self, x) -> np.ndarray:
        x = _as_vector(x, self.dimension)
        return self.project_batch(x[None, :])[0]

    def project_batch(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dimension:
            raise InputError("dimension mismatch in project_batch")
        return self._project_batch(X)

    # -- radii ----------------------------------------------------------------

    def inradius(self) -> float:
        raise NotImplementedError

    def circumradius(self) -> float:
        return self.circumradius_estimate().value

    def circumradius_estimate(self, budget: int = 256, seed: int = 0) -> RadiusEstimate:
        raise NotImplementedError

    def min_norm_boundary_point(self):
        raise NotImplementedError

    # -- origin preconditions ---------------------------------------------

    def origin_interior(self) -> bool:
        raise NotImplementedError

    def require_origin_interior(self) -> None:
        if not self.origin_interior():
            raise PreconditionError(f"{self.kind} body does not contain 0 in its interior")

    # -- sampling -----------------------------------------------------------

    def boundary_sample(self, count: int, seed: int) -> np.ndarray:
        if count < 1:
            raise InputError("count must be >= 1")
        return self._boundary_from_dirs(sphere_directions(count, self.dimension, seed))

    def interior_sample(self, count: int, seed: int) -> np.ndarray:
        """Deterministic points in the body: boundary directions pulled inward.

        Directions and pull-in fractions come from one joint low-discrepancy
        stream so coverage of the body is even.
        """
        if count < 1:
            raise InputError("count must be >= 1")
        base = self._interior_base()
        dirs, t = sphere_and_radius(count, self.dimension, seed)
        shell = self._boundary_from_dirs(dirs)
        return base + t[:, None] * (shell - base)

    def _boundary_from_dirs(self, dirs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distance_to_boundary(self, x) -> float:
        """Signed distance to the boundary (positive inside)."""
        raise NotImplementedError

    def _interior_base(self) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Ball(ConvexBody):
    """Closed Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float
    require_origin_interior_flag: bool = field(default=False, repr=False)
    kind = "ball"

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(-1)
        if center.ndim != 1 or center.size < 1:
            raise InputError("ball center must be a nonempty vector")
        if not np.isfinite(center).all():
            raise InputError("ball center must be finite")
        if not (self.radius > 0) or not np.isfinite(self.radius):
            raise InputError("ball radius must be positive and finite")
        center.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))
        if self.require_origin_interior_flag:
            self.require_origin_interior()

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def _contains_batch(self, X, tol):
        return np.linalg.norm(X - self.center, axis=1) <= self.radius + tol

    def _project_batch(self, X):
        diff = X - self.center
        norms = np.linalg.norm(diff, axis=1)
        out = X.copy()
        outside = norms > self.radius
        if outside.any():
            out[outside] = self.center + diff[outside] * (self.radius / norms[outside])[:, None]
        return out

    def origin_interior(self) -> bool:
        return np.linalg.norm(self.center) < self.radius

    def inradius(self) -> float:
        self.require_origin_interior()
        return self.radius - float(np.linalg.norm(self.center))

    def circumradius_estimate(self, budget: int = 256, seed: int = 0) -> RadiusEstimate:
        c_norm = float(np.linalg.norm(self.center))
        if c_norm == 0.0:
            witness = np.zeros(self.dimension)
            witness[0] = self.radius
        else:
            witness = self.center * (1.0 + self.radius / c_norm)
        return RadiusEstimate(c_norm + self.radius, witness, lower_bound_only=False)

    def min_norm_boundary_point(self):
        self.require_origin_interior()
        c_norm = float(np.linalg.norm(self.center))
        if c_norm == 0.0:
            point = np.zeros(self.dimension)
            point[0] = self.radius
            return point, self.radius
        point = self.center * (1.0 - self.radius / c_norm)
        return point, self.radius - c_norm

    def _boundary_from_dirs(self, dirs):
        return self.center + self.radius * dirs

    def distance_to_boundary(self, x) -> float:
        x = _as_vector(x, self.dimension)
        return self.radius - float(np.linalg.norm(x - self.center))

    def _interior_base(self):
        return self.center

    def to_json(self) -> dict:
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True)
class HPolytope(ConvexBody):
    """Bounded polytope {x : A x <= b}; rows are normalized at construction.

    Boundedness is certified at construction by 2n linear programs over the
    +/- coordinate directions: the polytope is bounded iff every coordinate is
    bounded above and below over the feasible set.
    """

    A: np.ndarray
    b: np.ndarray
    vertices: Optional[np.ndarray] = None
    require_origin_interior_flag: bool = field(default=False, repr=False)
    kind = "hpolytope"

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != b.shape[0] or A.shape[0] < 1:
            raise InputError("A must be (m,n) with b of length m")
        if not np.isfinite(A).all() or not np.isfinite(b).all():
            raise InputError("A and b must be finite")
        row_norms = np.linalg.norm(A, axis=1)
        if np.any(row_norms == 0.0):
            raise InputError("zero rows in A are not allowed")
        A = A / row_norms[:, None]
        b = b / row_norms
        A.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

        n = A.shape[1]
        for i in range(n):
            for sign in (1.0, -1.0):
                c = np.zeros(n)
                c[i] = sign
                res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
                if res.status == 3:
                    raise InputError(f"polytope is unbounded along coordinate {i}")
                if res.status == 2:
                    raise InputError("polytope is empty")

        if self.vertices is not None:
            V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
            if V.shape[1] != n:
                raise InputError("vertex dimension mismatch")
            slack = V @ A.T - b
            if np.max(slack) > 1e-9:
                raise InputError("a supplied vertex violates A v <= b beyond 1e-9")
            V = V.copy()
            V.flags.writeable = False
            object.__setattr__(self, "vertices", V)
        if self.require_origin_interior_flag:
            self.require_origin_interior()

    @property
    def dimension(self) -> int:
        return self.A.shape[1]

    def _contains_batch(self, X, tol):
        return np.max(X @ self.A.T - self.b, axis=1) <= tol

    def _project_batch(self, X):
        inside = self._contains_batch(X, 0.0)
        out = X.copy()
        todo = ~inside
        if todo.any():
            out[todo] = self._dykstra(X[todo])
        return out

    def _dykstra(self, X):
        # Cyclic Dykstra over the halfspaces; exact in the limit for
        # intersections of convex sets, geometric rate for polyhedra.
        A, b = self.A, self.b
        m = A.shape[0]
        x = X.copy()
        corr = np.zeros((m,) + X.shape)
        for _ in range(_DYKSTRA_MAX_SWEEPS):
            x_prev = x.copy()
            for i in range(m):
                y = x + corr[i]
                viol = np.maximum(y @ A[i] - b[i], 0.0)
                x = y - viol[:, None] * A[i]
                corr[i] = y - x
            change = np.abs(x - x_prev).max()
            if change < _DYKSTRA_TOL:
                return x
        resid = float(np.max(X @ self.A.T - self.b))
        raise ConvergenceError("Dykstra projection did not converge", best=x, residual=resid)

    def origin_interior(self) -> bool:
        return bool(np.all(self.b > 0.0))

    def inradius(self) -> float:
        self.require_origin_interior()
        return float(np.min(self.b))

    def circumradius_estimate(self, budget: int = 256, seed: int = 0) -> RadiusEstimate:
        if self.vertices is not None:
            norms = np.linalg.norm(self.vertices, axis=1)
            j = int(np.argmax(norms))
            return RadiusEstimate(float(norms[j]), self.vertices[j].copy(), lower_bound_only=False)
        # No vertex list: hill-climb ||x|| from boundary samples.  The result
        # is a certified lower bound (a feasible witness), not the exact value.
        pts = self.boundary_sample(max(budget, 16), seed)
        norms = np.linalg.norm(pts, axis=1)
        order = np.argsort(norms)[::-1][:8]
        best_x = pts[order[0]]
        best_v = norms[order[0]]
        for idx in order:
            x = pts[idx]
            step = 0.5
            for _ in range(200):
                if step < 1e-12:
                    break
                nx = np.linalg.norm(x)
                probe = self.project((1.0 + step) * x if nx > 0 else x + step)
                pv = np.linalg.norm(probe)
                if pv > np.linalg.norm(x) + 1e-15:
                    x = probe
                else:
                    step *= 0.5
            v = float(np.linalg.norm(x))
            if v > best_v:
                best_v, best_x = v, x
        return RadiusEstimate(best_v, best_x, lower_bound_only=True)

    def min_norm_boundary_point(self):
        self.require_origin_interior()
        j = int(np.argmin(self.b))  # lowest row index wins ties
        point = self.b[j] * self.A[j]
        return point, float(self.b[j])

    @cached_property
    def _chebyshev_center(self) -> np.ndarray:
        n = self.dimension
        # max t  s.t.  A x + t <= b  (rows are unit-norm)
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A_ub = np.hstack([self.A, np.ones((self.A.shape[0], 1))])
        res = linprog(c, A_ub=A_ub, b_ub=self.b, bounds=[(None, None)] * (n + 1), method="highs")
        if not res.success:
            raise ConvergenceError("Chebyshev center LP failed")
        return res.x[:n]

    def _interior_base(self):
        if self.origin_interior():
            return np.zeros(self.dimension)
        return self._chebyshev_center

    def _boundary_from_dirs(self, dirs):
        base = self._interior_base()
        # Ray shooting: first constraint hit along each direction.
        denom = dirs @ self.A.T  # (count, m)
        slack = self.b - base @ self.A.T  # (m,)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(denom > 1e-14, slack / denom, np.inf)
        t_star = np.min(t, axis=1)
        return base + t_star[:, None] * dirs

    def active_constraints(self, x, tol: float = 1e-8):
        x = _as_vector(x, self.dimension)
        return [int(i) for i in np.nonzero(self.b - self.A @ x <= tol)[0]]

    def distance_to_boundary(self, x) -> float:
        x = _as_vector(x, self.dimension)
        return float(np.min(self.b - self.A @ x))

    def to_json(self) -> dict:
        out = {"kind": "hpolytope", "A": self.A.tolist(), "b": self.b.tolist()}
        if self.vertices is not None:
            out["vertices"] = self.vertices.tolist()
        return out


@dataclass(frozen=True)
class Ellipsoid(ConvexBody):
    """Ellipsoid {x : (x-c)^T Q (x-c) <= 1} with Q symmetric positive definite."""

    Q: np.ndarray
    center: np.ndarray
    require_origin_interior_flag: bool = field(default=False, repr=False)
    kind = "ellipsoid"

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        center = np.asarray(self.center, dtype=float).reshape(-1)
        n = center.shape[0]
        if Q.shape != (n, n):
            raise InputError("Q must be square and match the center dimension")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise InputError("Q must be symmetric")
        evals, evecs = np.linalg.eigh(Q)
        if np.min(evals) <= 0:
            raise InputError("Q must be positive definite")
        Q.flags.writeable = False
        center.flags.writeable = False
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "_evals", evals)
        object.__setattr__(self, "_evecs", evecs)
        if self.require_origin_interior_flag:
            self.require_origin_interior()

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def _quad(self, X):
        diff = X - self.center
        return np.einsum("ki,ij,kj->k", diff, self.Q, diff)

    def _contains_batch(self, X, tol):
        return self._quad(X) <= 1.0 + tol

    def _sqrt_inv(self):
        return self._evecs @ np.diag(1.0 / np.sqrt(self._evals)) @ self._evecs.T

    def _project_batch(self, X):
        out = X.copy()
        q = self._quad(X)
        outside = q > 1.0
        if not outside.any():
            return out
        evals, evecs = self._evals, self._evecs
        W = (X[outside] - self.center) @ evecs  # eigen-coordinates
        t = np.zeros(W.shape[0])
        # g(t) = sum_i q_i w_i^2 / (1 + t q_i)^2 - 1 is decreasing convex on
        # t >= 0, so Newton from 0 increases monotonically to the root.
        converged = np.zeros(W.shape[0], dtype=bool)
        for _ in range(_ELLIPSOID_NEWTON_CAP):
            denom = 1.0 + np.outer(t, evals)
            gval = np.sum(evals * W**2 / denom**2, axis=1) - 1.0
            converged = np.abs(gval) < 1e-14
            if converged.all():
                break
            gp = -2.0 * np.sum(evals**2 * W**2 / denom**3, axis=1)
            t = np.maximum(t - np.where(converged, 0.0, gval / gp), 0.0)
        if not converged.all():
            # Bisection fallback for any stalled row.
            for row in np.nonzero(~converged)[0]:
                w2 = evals * W[row] ** 2

                def g(tt):
                    return float(np.sum(w2 / (1.0 + tt * evals) ** 2) - 1.0)

                hi = max(t[row], 1.0)
                while g(hi) > 0.0:
                    hi *= 2.0
                    if hi > 1e18:
                        raise ConvergenceError(
                            "ellipsoid projection failed to bracket the multiplier",
                            best=out, residual=g(t[row]))
                t[row] = brentq(g, 0.0, hi, xtol=1e-15, maxiter=200)
        Z = W / (1.0 + np.outer(t, evals))
        out[outside] = self.center + Z @ evecs.T
        return out

    def origin_interior(self) -> bool:
        c = self.center
        return float(c @ self.Q @ c) < 1.0

    def inradius(self) -> float:
        return self.min_norm_boundary_point()[1]

    def circumradius_estimate(self, budget: int = 256, seed: int = 0) -> RadiusEstimate:
        # max ||c + z|| over z^T Q z <= 1; substituting u = Q^{1/2} z turns the
        # boundary problem into a sphere-constrained quadratic solved exactly.
        S = self._sqrt_inv()
        B = S @ S  # = Q^{-1}
        g = S @ self.center
        u, val = sphere_quadratic_max(B, g, 1.0)
        witness = self.center + S @ u
        value = float(np.sqrt(max(val + self.center @ self.center, 0.0)))
        return RadiusEstimate(value, witness, lower_bound_only=False)

    def min_norm_boundary_point(self):
        self.require_origin_interior()
        S = self._sqrt_inv()
        B = S @ S
        g = S @ self.center
        u, val = sphere_quadratic_min(B, g, 1.0)
        point = self.center + S @ u
        value = float(np.sqrt(max(val + self.center @ self.center, 0.0)))
        return point, value

    def _boundary_from_dirs(self, dirs):
        return self.center + dirs @ self._sqrt_inv().T

    def distance_to_boundary(self, x) -> float:
        x = _as_vector(x, self.dimension)
        q = float(self._quad(x[None, :])[0])
        bnd = self._project_to_boundary(x)
        d = float(np.linalg.norm(x - bnd))
        return d if q <= 1.0 else -d

    def _project_to_boundary(self, x):
        # Nearest boundary point from either side; root of the same secular
        # equation as projection but allowing t in (-1/q_max, inf).
        evals, evecs = self._evals, self._evecs
        w = evecs.T @ (x - self.center)
        if np.allclose(w, 0.0):
            z = np.zeros_like(w)
            z[np.argmax(evals)] = 1.0 / np.sqrt(np.max(evals))
            return self.center + evecs @ z

        def g(t):
            return float(np.sum(evals * w**2 / (1.0 + t * evals) ** 2) - 1.0)

        lo = -1.0 / np.max(evals) * (1.0 - 1e-12)
        if g(0.0) > 0.0:
            hi = 1.0
            while g(hi) > 0.0:
                hi *= 2.0
            lo = 0.0
        else:
            hi = 0.0
            while g(lo) < 0.0:
                lo = (lo - 1.0 / np.max(evals)) / 2.0
        t = brentq(g, lo, hi, xtol=1e-15, maxiter=200)
        z = w / (1.0 + t * evals)
        return self.center + evecs @ z

    def _interior_base(self):
        return self.center

    def to_json(self) -> dict:
        return {"kind": "ellipsoid", "Q": self.Q.tolist(), "center": self.center.tolist()}


def body_from_json(obj: dict) -> ConvexBody:
    """Build a body from its JSON descriptor."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("body descriptor must be an object with a 'kind' key")
    kind = obj["kind"]
    try:
        if kind == "ball":
            return Ball(np.asarray(obj["center"], dtype=float), float(obj["radius"]))
        if kind == "hpolytope":
            vertices = obj.get("vertices")
            return HPolytope(
                np.asarray(obj["A"], dtype=float),
                np.asarray(obj["b"], dtype=float),
                None if vertices is None else np.asarray(vertices, dtype=float),
            )
        if kind == "ellipsoid":
            return Ellipsoid(np.asarray(obj["Q"], dtype=float), np.asarray(obj["center"], dtype=float))
    except KeyError as exc:
        raise InputError(f"body descriptor missing key {exc}") from exc
    raise InputError(f"unknown body kind {kind!r}")


def box(lo, hi) -> HPolytope:
    """Axis-aligned box [lo_1,hi_1] x ... x [lo_n,hi_n] as an H-polytope."""
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    if lo.shape != hi.shape or np.any(lo >= hi):
        raise InputError("box needs lo < hi componentwise")
    n = lo.shape[0]
    A = np.vstack([np.eye(n), -np.eye(n)])
    b = np.concatenate([hi, -lo])
    corners = np.array(np.meshgrid(*[[l, h] for l, h in zip(lo, hi)], indexing="ij"))
    vertices = corners.reshape(n, -1).T
    return HPolytope(A, b, vertices)
