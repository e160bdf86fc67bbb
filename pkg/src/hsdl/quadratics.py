"""Exact extremization of quadratics over Euclidean spheres.

Solves min/max of  u^T B u + 2 g^T u  subject to ||u|| = rho  (B symmetric)
via the secular equation in the eigenbasis of B, including the degenerate
("hard") case where g has no component on the extreme eigenspace.  This is
the workhorse behind exact ellipsoid inradius/circumradius computations.
"""

import numpy as np
from scipy.optimize import brentq


def sphere_quadratic_min(B, g, rho):
    """Global minimizer of u^T B u + 2 g^T u on the sphere ||u|| = rho.

    Returns (u, value).  The global minimizer satisfies (B - sigma I) u = -g
    with sigma <= lambda_min(B); sigma is found from the secular equation,
    with a rank-deficient branch when g is orthogonal to the bottom
    eigenspace.
    """
    B = np.asarray(B, dtype=float)
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    if B.shape != (n, n):
        raise ValueError("B and g dimensions disagree")
    if rho <= 0:
        raise ValueError("rho must be positive")

    beta, V = np.linalg.eigh(B)
    d = V.T @ g
    scale = max(1.0, np.max(np.abs(beta)))
    b_min = beta[0]
    cluster = beta <= b_min + 1e-12 * scale

    def u_norm_sq(s):
        # s = b_min - sigma > 0; components on the cluster use gap s itself.
        gaps = np.where(cluster, s, s + (beta - b_min))
        return float(np.sum((d / gaps) ** 2))

    # Norm contribution that survives when the cluster components of d vanish.
    off = ~cluster
    fixed_sq = float(np.sum((d[off] / (beta[off] - b_min)) ** 2)) if off.any() else 0.0
    cluster_mass = float(np.sum(d[cluster] ** 2))

    hard = cluster_mass <= (1e-14 * max(1.0, np.linalg.norm(d))) ** 2 and fixed_sq <= rho**2
    if hard:
        # sigma = b_min; fill the remaining norm inside the bottom eigenspace.
        u_eig = np.zeros(n)
        if off.any():
            u_eig[off] = d[off] / (b_min - beta[off])
        tau = np.sqrt(max(rho**2 - fixed_sq, 0.0))
        idx = int(np.argmax(cluster))
        u_eig[idx] += tau
        u = V @ u_eig
    else:
        # phi(s) = ||u(s)|| is decreasing in s; solve ||u(s)|| = rho by a
        # well-conditioned root find on 1/||u(s)|| - 1/rho.
        def w(s):
            return 1.0 / np.sqrt(u_norm_sq(s)) - 1.0 / rho

        s_lo = 1e-16 * scale
        while w(s_lo) > 0 and s_lo > 1e-300:
            s_lo *= 1e-2
        s_hi = max(np.linalg.norm(d) / rho, s_lo * 10, 1e-12 * scale)
        while w(s_hi) < 0:
            s_hi *= 2.0
        s_star = brentq(w, s_lo, s_hi, xtol=1e-15, rtol=1e-15, maxiter=200)
        gaps = np.where(cluster, s_star, s_star + (beta - b_min))
        u = V @ (-(d / gaps))  # u_i = d_i / (sigma - beta_i), sigma = b_min - s*

    value = float(u @ B @ u + 2.0 * g @ u)
    return u, value


def sphere_quadratic_max(B, g, rho):
    """Global maximizer of u^T B u + 2 g^T u on the sphere ||u|| = rho."""
    u, value = sphere_quadratic_min(-np.asarray(B, dtype=float), -np.asarray(g, dtype=float), rho)
    return u, -value
