import numpy as np
import pytest

from hsdl.errors import InputError
from hsdl.norms import (Euclidean, Lp, Polyhedral, Pushforward, Weighted,
                        equivalence_constants, norm_from_json, nu_constant, r_star)

from conftest import refine_extremum, scan_sphere

ALL_NORMS = [
    ("euclidean", Euclidean(), 3),
    ("l1", Lp(1.0), 3),
    ("l2", Lp(2.0), 3),
    ("l3", Lp(3.0), 3),
    ("linf", Lp(np.inf), 3),
    ("weighted2", Weighted(np.array([1.0, 4.0, 0.25]), 2.0), 3),
    ("weighted1", Weighted(np.array([2.0, 1.0]), 1.0), 2),
    ("weightedinf", Weighted(np.array([2.0, 1.0]), np.inf), 2),
    ("poly", Polyhedral(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])), 2),
    ("push", Pushforward(np.array([[2.0, 1.0], [0.0, 1.0]])), 2),
]


# ---------------------------------------------------------------- eval

def test_eval_l1():
    assert Lp(1.0).eval([1.0, -2.0]) == pytest.approx(3.0)


def test_eval_linf():
    assert Lp(np.inf).eval([1.0, -2.0]) == pytest.approx(2.0)


def test_eval_pushforward_doubling():
    assert Pushforward(2.0 * np.eye(2)).eval([1.0, 0.0]) == pytest.approx(2.0)


def test_eval_dimension_mismatch():
    with pytest.raises(InputError):
        Weighted(np.array([1.0, 2.0]), 2.0).eval([1.0, 2.0, 3.0])


@pytest.mark.parametrize("name,norm,dim", ALL_NORMS, ids=lambda v: v if isinstance(v, str) else "")
def test_norm_axioms(name, norm, dim, rng):
    X = rng.normal(size=(1000, dim)) * 3.0
    Y = rng.normal(size=(1000, dim)) * 3.0
    lam = rng.normal(size=1000) * 2.0
    nx, ny = norm.eval_batch(X), norm.eval_batch(Y)
    assert np.all(norm.eval_batch(X + Y) <= nx + ny + 1e-10)
    assert np.allclose(norm.eval_batch(lam[:, None] * X), np.abs(lam) * nx, atol=1e-10)
    assert np.all(nx[np.linalg.norm(X, axis=1) > 1e-8] > 0.0)
    assert norm.eval(np.zeros(dim)) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------- dual

def test_dual_l1_is_linf_value():
    # oracle: sup of <y,x> over a dense l1 unit-sphere sample
    y = np.array([1.0, -2.0])
    dirs = scan_sphere(2, 20000, seed=1)
    ball = dirs / np.sum(np.abs(dirs), axis=1, keepdims=True)
    assert np.max(ball @ y) <= Lp(1.0).dual_eval(y) + 1e-9
    assert Lp(1.0).dual_eval(y) == pytest.approx(2.0)


def test_dual_euclidean_self():
    assert Euclidean().dual_eval([3.0, 4.0]) == pytest.approx(5.0)


def test_dual_linf_is_l1_value():
    assert Lp(np.inf).dual_eval([1.0, -2.0]) == pytest.approx(3.0)


@pytest.mark.parametrize("name,norm,dim", ALL_NORMS, ids=lambda v: v if isinstance(v, str) else "")
def test_generalized_cauchy_schwarz(name, norm, dim, rng):
    X = rng.normal(size=(200, dim)) * 2.0
    Y = rng.normal(size=(200, dim)) * 2.0
    pair = np.sum(X * Y, axis=1)
    bound = norm.dual_eval_batch(Y) * norm.eval_batch(X)
    assert np.all(pair <= bound + 1e-8)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, np.inf])
def test_dual_of_dual_lp(p, rng):
    q = np.inf if p == 1.0 else (1.0 if p == np.inf else p / (p - 1.0))
    X = rng.normal(size=(300, 4))
    np.testing.assert_allclose(Lp(p).dual_eval_batch(X), Lp(q).eval_batch(X), atol=1e-9)
    np.testing.assert_allclose(Lp(q).dual_eval_batch(X), Lp(p).eval_batch(X), atol=1e-9)


def test_polyhedral_dual_lp_vs_vertex_oracle():
    # unit ball of max(|x1|,|x2|) is the square: dual = l1; vertex oracle
    poly = Polyhedral(np.eye(2))
    y = np.array([0.7, -1.3])
    verts = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    assert poly.dual_eval(y) == pytest.approx(np.max(verts @ y), abs=1e-9)
    assert poly.dual_eval(y) == pytest.approx(np.sum(np.abs(y)), abs=1e-9)


# --------------------------------------------------- equivalence constants

def closed_theta(kind, n):
    if kind == "linf":
        return 1.0, np.sqrt(n)
    if kind == "l1":
        return 1.0 / np.sqrt(n), 1.0
    raise AssertionError


@pytest.mark.parametrize("n", [2, 3, 5])
def test_theta_linf_closed_form(n):
    t1, t2 = equivalence_constants(Lp(np.inf), dim=n)
    e1, e2 = closed_theta("linf", n)
    assert t1 == pytest.approx(e1, abs=1e-6)
    assert t2 == pytest.approx(e2, abs=1e-6)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_theta_l1_closed_form(n):
    t1, t2 = equivalence_constants(Lp(1.0), dim=n)
    e1, e2 = closed_theta("l1", n)
    assert t1 == pytest.approx(e1, abs=1e-6)
    assert t2 == pytest.approx(e2, abs=1e-6)


def test_theta_euclidean_trivial():
    assert equivalence_constants(Euclidean(), dim=4) == (1.0, 1.0)


@pytest.mark.parametrize("norm,dim", [(Lp(np.inf), 2), (Lp(1.0), 3), (Lp(2.5), 3),
                                      (Weighted(np.array([1.0, 4.0]), 2.0), 2)])
def test_theta_optimizer_matches_closed_form(norm, dim):
    auto = equivalence_constants(norm, dim=dim, method="auto")
    opt = equivalence_constants(norm, dim=dim, method="optimize")
    assert opt[0] == pytest.approx(auto[0], abs=1e-6)
    assert opt[1] == pytest.approx(auto[1], abs=1e-6)


@pytest.mark.parametrize("name,norm,dim", [v for v in ALL_NORMS if v[2] <= 3],
                         ids=lambda v: v if isinstance(v, str) else "")
def test_theta_bracketed_by_sphere_scan(name, norm, dim):
    # 1e5-point scan of 1/N(x), refined by nested local resampling
    pts = scan_sphere(dim, 100_000, seed=2)

    def inv_norm(X):
        return 1.0 / norm.eval_batch(X)

    scan_min, _ = refine_extremum(inv_norm, pts, "min")
    scan_max, _ = refine_extremum(inv_norm, pts, "max")
    t1, t2 = equivalence_constants(norm, dim=dim)
    assert scan_min - 1e-3 <= t1 <= scan_min + 1e-9
    assert scan_max - 1e-9 <= t2 <= scan_max + 1e-3


@pytest.mark.parametrize("name,norm,dim", ALL_NORMS, ids=lambda v: v if isinstance(v, str) else "")
def test_sandwich_inequality(name, norm, dim, rng):
    t1, t2 = equivalence_constants(norm, dim=dim)
    X = rng.normal(size=(1000, dim)) * 5.0
    nx = norm.eval_batch(X)
    e2 = np.linalg.norm(X, axis=1)
    assert np.all(t1 * nx <= e2 + 1e-8)
    assert np.all(e2 <= t2 * nx + 1e-8)


# ---------------------------------------------------------------- nu / r*

def test_nu_euclidean():
    assert nu_constant(Euclidean(), dim=3) == pytest.approx(1.0)


def test_nu_linf_r2():
    assert nu_constant(Lp(np.inf), dim=2) == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-9)


def test_nu_l1_r2():
    assert nu_constant(Lp(1.0), dim=2) == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-9)


def test_r_star_euclidean():
    assert r_star(Euclidean(), 1.0, dim=2) == pytest.approx(1.0)


def test_r_star_linf_r2():
    assert r_star(Lp(np.inf), 1.0, dim=2) == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-9)


def test_r_star_l1_r3():
    assert r_star(Lp(1.0), 2.0, dim=3) == pytest.approx(2.0, abs=1e-9)


def test_r_star_rejects_nonpositive():
    with pytest.raises(InputError):
        r_star(Euclidean(), 0.0, dim=2)


# ---------------------------------------------------------------- validation

def test_polyhedral_must_span():
    with pytest.raises(InputError):
        Polyhedral(np.array([[1.0, 0.0], [2.0, 0.0]]))


def test_pushforward_must_be_invertible():
    with pytest.raises(InputError):
        Pushforward(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_weighted_needs_positive_weights():
    with pytest.raises(InputError):
        Weighted(np.array([1.0, 0.0]), 2.0)


def test_lp_needs_p_ge_1():
    with pytest.raises(InputError):
        Lp(0.5)


def test_norm_json_roundtrip(rng):
    X = rng.normal(size=(50, 2))
    for _, norm, dim in ALL_NORMS:
        if dim != 2:
            continue
        clone = norm_from_json(norm.to_json())
        np.testing.assert_allclose(clone.eval_batch(X), norm.eval_batch(X), atol=1e-12)


def test_norm_json_inf_spelling():
    assert norm_from_json({"kind": "lp", "p": "inf"}).p == np.inf
