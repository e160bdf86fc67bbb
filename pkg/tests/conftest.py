"""Shared brute-force oracles for the test suite.

These scanners are deliberately independent of the package's optimizers:
they only ever evaluate objectives on dense deterministic samples.
"""

import numpy as np
import pytest
from scipy.special import ndtri
from scipy.stats import qmc


def scan_sphere(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Dense deterministic point set on the unit sphere."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    z = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def refine_extremum(objective, pts, mode, rounds=4, local=400, shrink=0.1, seed=0):
    """Nested sampling refinement of a sphere-scan extremum.

    Pure sampling: take the best scan point, resample a shrinking spherical
    cap around it, repeat.  Stays independent of any gradient machinery.
    """
    sign = 1.0 if mode == "max" else -1.0
    vals = sign * objective(pts)
    best = pts[np.argmax(vals)]
    best_val = np.max(vals)
    rng = np.random.default_rng(seed)
    width = shrink
    for _ in range(rounds):
        cloud = best + width * rng.normal(size=(local, pts.shape[1]))
        cloud /= np.linalg.norm(cloud, axis=1, keepdims=True)
        vals = sign * objective(cloud)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = vals[j]
            best = cloud[j]
        width *= 0.1
    return sign * best_val, best


def scan_ball(dim: int, count: int, radius: float = 1.0, seed: int = 0) -> np.ndarray:
    """Dense deterministic point set in a centered ball (includes boundary).

    Directions and radii come from one joint stream: pairing two separate
    low-discrepancy streams elementwise correlates them and misses sectors.
    """
    u = qmc.Halton(d=dim + 1, scramble=True, seed=seed).random(count)
    z = ndtri(np.clip(u[:, :dim], 1e-12, 1 - 1e-12))
    dirs = z / np.linalg.norm(z, axis=1, keepdims=True)
    radii = u[:, dim] ** (1.0 / dim)
    pts = dirs * (radius * radii)[:, None]
    pts[: min(count, dim)] = radius * np.eye(dim)[: min(count, dim)]
    pts[min(count, dim): min(count, 2 * dim)] = -radius * np.eye(dim)[: min(max(count - dim, 0), dim)]
    return pts


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
