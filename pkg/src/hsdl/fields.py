"""Vector-field descriptors: the built-in construction families plus custom maps.

Every field is an immutable descriptor usable as `field(x)` for a single
point or `field.eval_batch(X)` for an (k,n) batch.  Metadata carried on every
field: `claimed_nonvanishing` (an assumption reported, never assumed true by
the verifiers) and `lipschitz_estimate` (None when no honest bound is known).
"""

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class VectorField:
    claimed_nonvanishing: bool = dc_field(default=False, kw_only=True)
    lipschitz_estimate: Optional[float] = dc_field(default=None, kw_only=True)

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    def eval_batch(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dimension:
            raise InputError(f"field expects dimension {self.dimension}, got {X.shape[1]}")
        return self._eval(X)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        return self.eval_batch(x[None, :])[0]

    def _eval(self, X) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def _meta_json(self) -> dict:
        out = {}
        if self.claimed_nonvanishing:
            out["claimed_nonvanishing"] = True
        if self.lipschitz_estimate is not None:
            out["lipschitz_estimate"] = self.lipschitz_estimate
        return out


@dataclass(frozen=True)
class Rotation2D(VectorField):
    """Planar rotation about the origin by `alpha` radians."""

    alpha: float

    def __post_init__(self):
        if not (-math.pi <= self.alpha <= math.pi):
            raise InputError("alpha must lie in [-pi, pi]")

    @property
    def dimension(self) -> int:
        return 2

    def _eval(self, X):
        c, s = math.cos(self.alpha), math.sin(self.alpha)
        return np.column_stack([c * X[:, 0] - s * X[:, 1], s * X[:, 0] + c * X[:, 1]])

    def to_json(self):
        return {"kind": "rotation2d", "alpha": self.alpha, **self._meta_json()}


@dataclass(frozen=True)
class Translation(VectorField):
    """f(x) = x - xprime."""

    xprime: np.ndarray

    def __post_init__(self):
        xp = np.asarray(self.xprime, dtype=float).reshape(-1)
        xp.flags.writeable = False
        object.__setattr__(self, "xprime", xp)
        if self.lipschitz_estimate is None:
            object.__setattr__(self, "lipschitz_estimate", 1.0)

    @property
    def dimension(self) -> int:
        return self.xprime.shape[0]

    def _eval(self, X):
        return X - self.xprime

    def to_json(self):
        return {"kind": "translation", "xprime": self.xprime.tolist(), **self._meta_json()}


@dataclass(frozen=True)
class BoundaryTranslate(VectorField):
    """f(x) = x - (1+eps) xprime, the just-outside translation family."""

    xprime: np.ndarray
    eps: float

    def __post_init__(self):
        xp = np.asarray(self.xprime, dtype=float).reshape(-1)
        xp.flags.writeable = False
        object.__setattr__(self, "xprime", xp)
        if not (self.eps > 0):
            raise InputError("eps must be positive")
        if self.lipschitz_estimate is None:
            object.__setattr__(self, "lipschitz_estimate", 1.0)

    @property
    def dimension(self) -> int:
        return self.xprime.shape[0]

    def _eval(self, X):
        return X - (1.0 + self.eps) * self.xprime

    def to_json(self):
        return {"kind": "boundary_translate", "xprime": self.xprime.tolist(),
                "eps": self.eps, **self._meta_json()}


@dataclass(frozen=True)
class Affine(VectorField):
    """f(x) = M x - c."""

    M: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, dtype=float))
        c = np.asarray(self.c, dtype=float).reshape(-1)
        if M.shape != (c.shape[0], c.shape[0]):
            raise InputError("M must be square and match c")
        M = M.copy()
        M.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c", c)
        if self.lipschitz_estimate is None:
            object.__setattr__(self, "lipschitz_estimate", float(np.linalg.norm(M, 2)))

    @property
    def dimension(self) -> int:
        return self.c.shape[0]

    def _eval(self, X):
        return X @ self.M.T - self.c

    def to_json(self):
        return {"kind": "affine", "M": self.M.tolist(), "c": self.c.tolist(), **self._meta_json()}


def identity(n: int) -> Affine:
    return Affine(np.eye(n), np.zeros(n), lipschitz_estimate=1.0)


def constant(c) -> Affine:
    """The constant field f(x) = c."""
    c = np.asarray(c, dtype=float).reshape(-1)
    return Affine(np.zeros((c.shape[0], c.shape[0])), -c, lipschitz_estimate=0.0)


@dataclass(frozen=True)
class Scaled(VectorField):
    """g(x) = inner(x) / mu."""

    inner: VectorField
    mu: float

    def __post_init__(self):
        if not (self.mu > 0):
            raise InputError("mu must be positive")
        if self.lipschitz_estimate is None and self.inner.lipschitz_estimate is not None:
            object.__setattr__(self, "lipschitz_estimate", self.inner.lipschitz_estimate / self.mu)
        if self.inner.claimed_nonvanishing:
            object.__setattr__(self, "claimed_nonvanishing", True)

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def _eval(self, X):
        return self.inner.eval_batch(X) / self.mu

    def to_json(self):
        return {"kind": "scaled", "mu": self.mu, "inner": self.inner.to_json(), **self._meta_json()}


@dataclass(frozen=True)
class KakutaniShift(VectorField):
    """x -> (sqrt(1 - ||x||^2), x_1, ..., x_{N-1}) on the closed unit ball.

    The radicand is clamped at zero so compositions that evaluate slightly
    outside the ball stay well defined.
    """

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise InputError("N must be >= 1")

    @property
    def dimension(self) -> int:
        return self.N

    def _eval(self, X):
        head = np.sqrt(np.maximum(0.0, 1.0 - np.sum(X**2, axis=1)))
        return np.column_stack([head, X[:, :-1]]) if self.N > 1 else head[:, None]

    def to_json(self):
        return {"kind": "kakutani", "N": self.N, **self._meta_json()}


@dataclass(frozen=True)
class RadialExtension(VectorField):
    """inner(x) inside the unit ball, inner(x/||x||) outside (continuous seam)."""

    inner: VectorField

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def _eval(self, X):
        norms = np.linalg.norm(X, axis=1)
        scale = np.where(norms > 1.0, norms, 1.0)
        return self.inner.eval_batch(X / scale[:, None])

    def to_json(self):
        return {"kind": "radial_extension", "inner": self.inner.to_json(), **self._meta_json()}


@dataclass(frozen=True)
class DisplacementForm(VectorField):
    """psi(x) = x - inner(x or x/||x||): the bounded-displacement form of a
    unit-ball self-map (the displacement x - psi(x) never exceeds norm 1)."""

    inner: VectorField

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def _eval(self, X):
        return X - RadialExtension(self.inner)._eval(X)

    def to_json(self):
        return {"kind": "displacement_form", "inner": self.inner.to_json(), **self._meta_json()}


@dataclass(frozen=True)
class SubspaceSplit(VectorField):
    """psi(x) = (x - pi(x)) + psi_F(pi(x)) with pi = projection onto the first
    m coordinates; an optional orthogonal `rotate` conjugates the splitting to
    an arbitrary m-dimensional subspace."""

    N: int
    m: int
    inner_f: VectorField
    rotate: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (1 <= self.m <= self.N):
            raise InputError("need 1 <= m <= N")
        if self.inner_f.dimension != self.m:
            raise InputError("inner_f must act on R^m")
        if self.rotate is not None:
            U = np.atleast_2d(np.asarray(self.rotate, dtype=float))
            if U.shape != (self.N, self.N):
                raise InputError("rotate must be N x N")
            if not np.allclose(U.T @ U, np.eye(self.N), atol=1e-10):
                raise InputError("rotate must be orthogonal")
            U = U.copy()
            U.flags.writeable = False
            object.__setattr__(self, "rotate", U)

    @property
    def dimension(self) -> int:
        return self.N

    def _eval(self, X):
        if self.rotate is not None:
            X = X @ self.rotate  # coordinates in the rotated frame: U^T x
        head = self.inner_f.eval_batch(X[:, :self.m])
        out = np.column_stack([head, X[:, self.m:]]) if self.m < self.N else head
        if self.rotate is not None:
            out = out @ self.rotate.T
        return out

    def to_json(self):
        out = {"kind": "subspace_split", "N": self.N, "m": self.m,
               "inner_f": self.inner_f.to_json(), **self._meta_json()}
        if self.rotate is not None:
            out["rotate"] = self.rotate.tolist()
        return out


@dataclass(frozen=True)
class Poly1D(VectorField):
    """One-dimensional polynomial field f(x) = sum_k coeffs[k] x^(deg-k)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).reshape(-1)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def dimension(self) -> int:
        return 1

    def _eval(self, X):
        return np.polyval(self.coeffs, X[:, 0])[:, None]

    def to_json(self):
        return {"kind": "poly1d", "coeffs": self.coeffs.tolist(), **self._meta_json()}


@dataclass(frozen=True)
class Custom(VectorField):
    """Arbitrary callable field.  `vectorized` callables receive (k,n) arrays."""

    fn: Callable
    dim: int
    vectorized: bool = False

    @property
    def dimension(self) -> int:
        return self.dim

    def _eval(self, X):
        if self.vectorized:
            out = np.asarray(self.fn(X), dtype=float)
        else:
            out = np.stack([np.asarray(self.fn(x), dtype=float).reshape(-1) for x in X])
        if out.shape != X.shape:
            raise InputError("custom field returned wrong shape")
        return out

    def to_json(self):
        raise InputError("custom callable fields have no JSON form")


def rotation_sup_displacement(alpha: float) -> float:
    """Closed-form maximum displacement of the planar rotation on the unit
    ball: pointwise ||f(x) - x|| = 2 sin(|alpha|/2) ||x||, maximal on the
    boundary."""
    if not (-math.pi <= alpha <= math.pi):
        raise InputError("alpha must lie in [-pi, pi]")
    return 2.0 * math.sin(abs(alpha) / 2.0)


def kakutani_fixed_point(N: int) -> np.ndarray:
    """The unique fixed point (c, ..., c) with c = 1/sqrt(N+1) of the
    truncated shift: the coordinate chain forces all entries equal and the
    head equation gives c = sqrt(1 - N c^2)."""
    if N < 1:
        raise InputError("N must be >= 1")
    return np.full(N, 1.0 / math.sqrt(N + 1.0))


def make_subspace_construction(N: int, m: int, rotate=None):
    """The bounded pair (psi, phi): psi splits off the first m coordinates and
    applies the displacement form of the truncated shift there; phi is the
    identity.  The pointwise gap ||phi(y) - psi(y)|| never exceeds 1."""
    if not (1 <= m <= N):
        raise InputError("need 1 <= m <= N")
    psi_f = DisplacementForm(KakutaniShift(m))
    psi = SubspaceSplit(N, m, psi_f, rotate=rotate)
    return psi, identity(N)


_FIELD_KINDS = {}


def field_from_json(obj: dict) -> VectorField:
    """Build a field from its JSON descriptor."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("field descriptor must be an object with a 'kind' key")
    kind = obj["kind"]
    meta = {}
    if "claimed_nonvanishing" in obj:
        meta["claimed_nonvanishing"] = bool(obj["claimed_nonvanishing"])
    if "lipschitz_estimate" in obj:
        meta["lipschitz_estimate"] = float(obj["lipschitz_estimate"])
    try:
        if kind == "rotation2d":
            return Rotation2D(float(obj["alpha"]), **meta)
        if kind == "translation":
            return Translation(np.asarray(obj["xprime"], dtype=float), **meta)
        if kind == "boundary_translate":
            return BoundaryTranslate(np.asarray(obj["xprime"], dtype=float),
                                     float(obj["eps"]), **meta)
        if kind == "affine":
            return Affine(np.asarray(obj["M"], dtype=float),
                          np.asarray(obj["c"], dtype=float), **meta)
        if kind == "identity":
            return identity(int(obj["N"]))
        if kind == "scaled":
            return Scaled(field_from_json(obj["inner"]), float(obj["mu"]), **meta)
        if kind == "kakutani":
            return KakutaniShift(int(obj["N"]), **meta)
        if kind == "radial_extension":
            return RadialExtension(field_from_json(obj["inner"]), **meta)
        if kind == "displacement_form":
            return DisplacementForm(field_from_json(obj["inner"]), **meta)
        if kind == "subspace_split":
            inner = obj.get("inner_f")
            inner_f = (field_from_json(inner) if inner is not None
                       else DisplacementForm(KakutaniShift(int(obj["m"]))))
            rotate = obj.get("rotate")
            return SubspaceSplit(int(obj["N"]), int(obj["m"]), inner_f,
                                 rotate=None if rotate is None else np.asarray(rotate, dtype=float),
                                 **meta)
        if kind == "poly1d":
            return Poly1D(np.asarray(obj["coeffs"], dtype=float), **meta)
    except KeyError as exc:
        raise InputError(f"field descriptor missing key {exc}") from exc
    raise InputError(f"unknown field kind {kind!r}")
