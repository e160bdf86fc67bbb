import math

import numpy as np
import pytest
from scipy.optimize import brentq

from hsdl.errors import InputError
from hsdl.fields import (Affine, BoundaryTranslate, Custom, DisplacementForm,
                         KakutaniShift, Poly1D, RadialExtension, Rotation2D,
                         Scaled, SubspaceSplit, Translation, constant,
                         field_from_json, identity, kakutani_fixed_point,
                         make_subspace_construction, rotation_sup_displacement)


# ---------------------------------------------------------------- eval

def test_rotation_quarter_turn():
    np.testing.assert_allclose(Rotation2D(math.pi / 2)([1.0, 0.0]), [0.0, 1.0], atol=1e-15)


def test_translation_eval():
    np.testing.assert_allclose(Translation(np.array([3.0, 0.0]))([1.0, 1.0]), [-2.0, 1.0])


def test_displacement_form_at_origin():
    # the shift sends 0 to the first basis vector, so psi(0) = -e1
    np.testing.assert_allclose(DisplacementForm(KakutaniShift(2))([0.0, 0.0]), [-1.0, 0.0])


def test_boundary_translate_eval():
    f = BoundaryTranslate(np.array([1.0, 0.0]), 0.1)
    np.testing.assert_allclose(f([0.0, 0.0]), [-1.1, 0.0])


def test_affine_eval():
    f = Affine(np.array([[2.0, 0.0], [0.0, 1.0]]), np.array([1.0, -1.0]))
    np.testing.assert_allclose(f([1.0, 1.0]), [1.0, 2.0])


def test_dimension_mismatch():
    with pytest.raises(InputError):
        Rotation2D(0.5)([1.0, 0.0, 0.0])


def test_custom_scalar_and_vectorized(rng):
    f1 = Custom(lambda x: x**2 + 1.0, dim=1)
    f2 = Custom(lambda X: X**2 + 1.0, dim=1, vectorized=True)
    X = rng.normal(size=(40, 1))
    np.testing.assert_allclose(f1.eval_batch(X), f2.eval_batch(X))


def test_custom_callable_failure_propagates():
    def broken(x):
        raise RuntimeError("callable blew up")

    with pytest.raises(RuntimeError, match="callable blew up"):
        Custom(broken, dim=2)([0.0, 0.0])


# ------------------------------------------------------- rotation family

def test_rotation_sup_closed_form_examples():
    assert rotation_sup_displacement(0.0) == pytest.approx(0.0)
    assert rotation_sup_displacement(math.pi / 3) == pytest.approx(1.0)
    assert rotation_sup_displacement(math.pi) == pytest.approx(2.0)


def test_rotation_alpha_domain():
    with pytest.raises(InputError):
        rotation_sup_displacement(4.0)
    with pytest.raises(InputError):
        Rotation2D(-4.0)


def test_rotation_pointwise_law(rng):
    for _ in range(50):
        alpha = rng.uniform(-math.pi, math.pi)
        x = rng.normal(size=2) * 3.0
        moved = np.linalg.norm(Rotation2D(alpha)(x) - x)
        assert moved == pytest.approx(2.0 * math.sin(abs(alpha) / 2.0) * np.linalg.norm(x),
                                      abs=1e-12)


# ------------------------------------------------------- kakutani family

@pytest.mark.parametrize("N", [1, 3, 8])
def test_kakutani_fixed_point(N):
    p = kakutani_fixed_point(N)
    # oracle: solve c = sqrt(1 - N c^2) for c directly
    c = brentq(lambda c: c - math.sqrt(max(1.0 - N * c * c, 0.0)), 0.0, 1.0)
    np.testing.assert_allclose(p, c, atol=1e-12)
    residual = np.linalg.norm(KakutaniShift(N)(p) - p)
    assert residual <= 1e-12


def test_kakutani_fixed_point_n3_value():
    np.testing.assert_allclose(kakutani_fixed_point(3), 0.5)


def test_kakutani_fixed_point_n1_value():
    assert kakutani_fixed_point(1)[0] == pytest.approx(1.0 / math.sqrt(2.0))


def test_kakutani_maps_ball_into_ball(rng):
    K = KakutaniShift(4)
    X = rng.normal(size=(2000, 4))
    X = X / np.linalg.norm(X, axis=1, keepdims=True) * rng.uniform(0, 1, size=(2000, 1))
    norms_sq = np.sum(K.eval_batch(X) ** 2, axis=1)
    np.testing.assert_allclose(norms_sq, 1.0 - X[:, -1] ** 2, atol=1e-12)
    assert np.all(norms_sq <= 1.0 + 1e-12)


def test_kakutani_clamps_outside_ball():
    K = KakutaniShift(2)
    out = K([3.0, 4.0])  # radicand clamps to 0
    np.testing.assert_allclose(out, [0.0, 3.0])


# ------------------------------------------------------- radial extension

def test_radial_extension_branch_agreement_exact(rng):
    inner = KakutaniShift(3)
    f = RadialExtension(inner)
    for _ in range(20):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        np.testing.assert_array_equal(f(u), inner(u))


def test_radial_extension_continuity_with_declared_lipschitz(rng):
    M = np.array([[0.5, 0.2], [-0.1, 0.8]])
    inner = Affine(M, np.array([0.3, -0.2]))
    f = RadialExtension(inner)
    L = inner.lipschitz_estimate
    for _ in range(50):
        u = rng.normal(size=2)
        u /= np.linalg.norm(u)
        for delta in (1e-6, -1e-6):
            gap = np.linalg.norm(f((1.0 + delta) * u) - f(u))
            assert gap <= L * 1e-6 + 1e-9


def test_displacement_form_bound(rng):
    psi = DisplacementForm(KakutaniShift(3))
    X = rng.normal(size=(10_000, 3))
    X = X / np.linalg.norm(X, axis=1, keepdims=True) * rng.uniform(0, 10, size=(10_000, 1))
    assert np.max(np.linalg.norm(X - psi.eval_batch(X), axis=1)) <= 1.0 + 1e-12


# ------------------------------------------------------- subspace split

def test_subspace_construction_at_zero():
    psi, phi = make_subspace_construction(8, 4)
    assert np.linalg.norm(phi(np.zeros(8)) - psi(np.zeros(8))) == pytest.approx(1.0)


def test_subspace_construction_big_projection(rng):
    psi, phi = make_subspace_construction(8, 4)
    g = KakutaniShift(4)
    for _ in range(20):
        y = rng.normal(size=8) * 3.0
        head = y[:4]
        assert np.linalg.norm(head) > 1.0
        gap = np.linalg.norm(phi(y) - psi(y))
        expected = np.linalg.norm(g(head / np.linalg.norm(head)))
        assert gap == pytest.approx(expected, abs=1e-12)
        assert gap <= 1.0 + 1e-12


def test_subspace_construction_uniform_bound(rng):
    psi, phi = make_subspace_construction(6, 3)
    Y = rng.normal(size=(5000, 6)) * 10.0
    gaps = np.linalg.norm(phi.eval_batch(Y) - psi.eval_batch(Y), axis=1)
    assert np.max(gaps) <= 1.0 + 1e-12


def test_subspace_split_rotation_conjugation(rng):
    c, s = math.cos(0.7), math.sin(0.7)
    U = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    base = SubspaceSplit(3, 1, DisplacementForm(KakutaniShift(1)))
    rotated = SubspaceSplit(3, 1, DisplacementForm(KakutaniShift(1)), rotate=U)
    for _ in range(10):
        x = rng.normal(size=3)
        np.testing.assert_allclose(rotated(x), U @ base(U.T @ x), atol=1e-12)


def test_subspace_split_validation():
    with pytest.raises(InputError):
        make_subspace_construction(4, 5)
    with pytest.raises(InputError):
        SubspaceSplit(3, 2, DisplacementForm(KakutaniShift(3)))


# ------------------------------------------------------- scaled / misc

def test_scaled_consistency_exact(rng):
    f = Translation(np.array([2.0, -1.0]))
    g = Scaled(f, 3.0)
    X = rng.normal(size=(100, 2))
    np.testing.assert_array_equal(g.eval_batch(X), f.eval_batch(X) / 3.0)


def test_scaled_propagates_metadata():
    f = Translation(np.array([2.0, 0.0]), claimed_nonvanishing=True)
    g = Scaled(f, 2.0)
    assert g.claimed_nonvanishing
    assert g.lipschitz_estimate == pytest.approx(0.5)


def test_identity_and_constant_helpers():
    np.testing.assert_allclose(identity(3)([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])
    np.testing.assert_allclose(constant([0.0, -3.0])([5.0, 5.0]), [0.0, -3.0])


def test_poly1d():
    f = Poly1D(np.array([1.0, 0.0, 1.0]))
    assert f([-1.0])[0] == pytest.approx(2.0)
    assert f([0.5])[0] == pytest.approx(1.25)


def test_field_json_roundtrip(rng):
    fields = [Rotation2D(0.3), Translation(np.array([1.0, 2.0]), claimed_nonvanishing=True),
              BoundaryTranslate(np.array([1.0, 0.0]), 0.2),
              Affine(np.array([[1.0, 0.5], [0.0, 2.0]]), np.array([0.1, 0.2])),
              Scaled(Translation(np.array([2.0, 0.0])), 2.0),
              DisplacementForm(KakutaniShift(2)),
              SubspaceSplit(4, 2, DisplacementForm(KakutaniShift(2))),
              Poly1D(np.array([1.0, 0.0, 1.0]))]
    for f in fields:
        clone = field_from_json(f.to_json())
        X = rng.normal(size=(20, f.dimension)) * 2.0
        np.testing.assert_allclose(clone.eval_batch(X), f.eval_batch(X), atol=1e-14)
        assert clone.claimed_nonvanishing == f.claimed_nonvanishing


def test_field_json_unknown_kind():
    with pytest.raises(InputError):
        field_from_json({"kind": "vortex"})
