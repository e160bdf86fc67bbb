"""Deterministic low-discrepancy sampling helpers.

Everything here is a pure function of (shape, seed): repeated calls with the
same arguments return identical arrays, and longer draws extend shorter ones
(prefix stability), which is what makes estimator budgets monotone.
"""

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc


def halton(count: int, dim: int, seed: int) -> np.ndarray:
    """`count` points of a scrambled Halton sequence in [0,1)^dim."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    engine = qmc.Halton(d=dim, scramble=True, seed=seed)
    return engine.random(count)


def _dirs_from_uniform(u: np.ndarray) -> np.ndarray:
    if u.shape[1] == 1:
        return np.where(u[:, :1] < 0.5, -1.0, 1.0)
    # Keep strictly inside (0,1) so ndtri stays finite.
    z = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return z / norms


def sphere_directions(count: int, dim: int, seed: int) -> np.ndarray:
    """Low-discrepancy unit vectors on the Euclidean sphere in R^dim.

    Uniform [0,1)^dim points are pushed through the inverse normal CDF and
    normalized; the result inherits the sequence's even coverage.
    """
    return _dirs_from_uniform(halton(count, dim, seed))


def sphere_and_radius(count: int, dim: int, seed: int):
    """Jointly low-discrepancy (direction, radius) pairs for ball filling.

    One (dim+1)-dimensional stream feeds both; pairing two separate streams
    elementwise would correlate them and leave sectors of the ball unvisited.
    """
    u = halton(count, dim + 1, seed)
    dirs = _dirs_from_uniform(u[:, :dim])
    radii = np.clip(u[:, dim], 1e-9, 1.0) ** (1.0 / max(dim, 1))
    return dirs, radii
