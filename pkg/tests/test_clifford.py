import numpy as np
import pytest
from hypothesis import given, strategies as st

from bosonic_bvp.clifford import (
    Multivector,
    MoebiusTransform,
    cayley,
    cayley_clifford,
    cayley_inverse,
    cayley_jacobian,
    cayley_jacobian_clifford,
    cayley_jacobian_fd,
    cayley_rotation,
    cayley_transform,
    clifford_inverse,
    reflect,
    reversion,
    sandwich,
    sandwich_matrix,
    vector_inverse,
)
from bosonic_bvp.errors import DimensionMismatch, DomainError, PoleError
from bosonic_bvp.suites import moebius_identity_errors, random_moebius

vec3 = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3)


def test_basis_relations():
    m = 4
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            ei, ej = Multivector.basis_vector(m, i), Multivector.basis_vector(m, j)
            expected = Multivector.scalar(m, -2.0 if i == j else 0.0)
            assert (ei * ej + ej * ei) == expected


def test_e1e2_is_bivector():
    m = 3
    e12 = Multivector.basis_vector(m, 1) * Multivector.basis_vector(m, 2)
    assert e12 == Multivector.blade(m, [1, 2])
    assert e12 * e12 == Multivector.scalar(m, -1.0)


@given(vec3)
def test_vector_squares_to_minus_norm(x):
    X = Multivector.vector(x)
    assert (X * X).allclose(Multivector.scalar(3, -float(np.dot(x, x))), atol=1e-10)


def test_reversion_signs():
    m = 4
    for idx, sign in (([1], 1), ([1, 2], -1), ([1, 2, 3], -1), ([1, 2, 3, 4], 1)):
        b = Multivector.blade(m, idx)
        assert reversion(b) == b * sign


def test_reversion_is_anti_automorphism(rng):
    m = 4
    for _ in range(10):
        a = Multivector(m, rng.standard_normal(16))
        b = Multivector(m, rng.standard_normal(16))
        assert reversion(a * b).allclose(reversion(b) * reversion(a), atol=1e-12)


def test_associativity(rng):
    m = 3
    a, b, c = (Multivector(m, rng.standard_normal(8)) for _ in range(3))
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-12)


def test_inverse_of_vector_and_general_element(rng):
    x = np.array([1.0, -2.0, 0.5])
    X = Multivector.vector(x)
    assert np.allclose(vector_inverse(X).to_vector(), -x / x.dot(x))
    assert (X * clifford_inverse(X)).allclose(Multivector.scalar(3, 1.0), atol=1e-12)
    a = Multivector(3, rng.standard_normal(8))
    assert (a * clifford_inverse(a)).allclose(Multivector.scalar(3, 1.0), atol=1e-10)


def test_inverse_errors():
    with pytest.raises(PoleError):
        clifford_inverse(Multivector.zero(3))
    with pytest.raises(DomainError):
        vector_inverse(Multivector.zero(3))
    # 1 + e_1 e_2 e_3 is a zero divisor in Cl_3? (e123)^2 = 1, so (1+e123)(1-e123) = 0
    with pytest.raises(PoleError):
        clifford_inverse(Multivector.scalar(3, 1.0) + Multivector.blade(3, [1, 2, 3]))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Multivector.vector([1, 0, 0]) * Multivector.vector([1, 0, 0, 0])


def test_to_vector_rejects_mixed_grade():
    with pytest.raises(DomainError):
        (Multivector.scalar(3, 1.0) + Multivector.vector([1, 0, 0])).to_vector()


@given(vec3, vec3)
def test_sandwich_is_reflection(a, u):
    if np.linalg.norm(a) < 1e-3:
        return
    lhs = sandwich(a, u)
    a, u = np.asarray(a), np.asarray(u)
    assert np.allclose(lhs, reflect(a, u), atol=1e-9 * (1 + np.linalg.norm(u)))
    assert np.isclose(np.linalg.norm(lhs), np.linalg.norm(u), atol=1e-9 * (1 + np.linalg.norm(u)))


def test_sandwich_identity_x_u_x():
    # x u x = |x|^2 u - 2<u,x> x in Cl_m
    x, u = np.array([0.3, -1.2, 2.0]), np.array([1.0, 0.5, -0.7])
    X, U = Multivector.vector(x), Multivector.vector(u)
    assert np.allclose((X * U * X).to_vector(), x.dot(x) * u - 2 * u.dot(x) * x)


def test_sandwich_zero_vector():
    with pytest.raises(DomainError):
        sandwich([0, 0, 0], [1, 0, 0])


def test_sandwich_matrix_orthogonal(rng):
    q = Multivector.vector(rng.standard_normal(3)) * Multivector.vector(rng.standard_normal(3)) + 0.7
    R = sandwich_matrix(q)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)


def test_moebius_primitives_match_closed_forms(rng):
    m = 3
    x = rng.standard_normal(m)
    b = rng.standard_normal(m)
    assert np.allclose(MoebiusTransform.translation(b)(x), x + b)
    assert np.allclose(MoebiusTransform.dilation(m, 2.5)(x), 2.5 * x)
    assert np.allclose(MoebiusTransform.inversion(m)(x), -x / x.dot(x))
    a = rng.standard_normal(m)
    assert np.allclose(MoebiusTransform.reflection(a)(x), reflect(a, x))


def test_composition_matches_factor_evaluation(rng):
    for _ in range(20):
        T = random_moebius(4, rng)
        x = rng.standard_normal(4)
        assert np.allclose(T(x), T.evaluate_factors(x), rtol=1e-9, atol=1e-9)


def test_inverse_transform(rng):
    for _ in range(10):
        T = random_moebius(3, rng)
        x = rng.standard_normal(3)
        assert np.allclose(T.inverse()(T(x)), x, atol=1e-8)


def test_rotation_is_orthogonal(rng):
    for _ in range(10):
        T = random_moebius(4, rng)
        R = T.rotation(rng.standard_normal(4))
        assert np.allclose(R.T @ R, np.eye(4), atol=1e-10)


def test_inversion_pole():
    with pytest.raises(PoleError):
        MoebiusTransform.inversion(3)(np.zeros(3))


def test_bad_primitives():
    with pytest.raises(DomainError):
        MoebiusTransform.dilation(3, -1.0)
    with pytest.raises(DomainError):
        MoebiusTransform.reflection([0.0, 0.0, 0.0])


def test_moebius_identities(rng):
    d, z = moebius_identity_errors(3, 30, rng)
    assert d < 1e-10
    assert z < 1e-8


# -- Cayley -----------------------------------------------------------------


def test_cayley_closed_form_matches_clifford_and_composition(rng):
    for conv in ("literal", "reflected"):
        T = cayley_transform(3, conv)
        for _ in range(5):
            x = rng.standard_normal(3) * 0.5
            assert np.allclose(cayley(x, conv), cayley_clifford(x, conv), atol=1e-12)
            assert np.allclose(cayley(x, conv), T(x), atol=1e-10)


def test_cayley_orientation():
    # the literal formula sends the ball below the hyperplane; the reflected convention above it
    assert cayley(np.zeros(3), "literal")[-1] == pytest.approx(-0.5)
    assert cayley(np.zeros(3), "reflected")[-1] == pytest.approx(0.5)


def test_cayley_sphere_to_plane_and_inverse(rng):
    z = rng.standard_normal((20, 4))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    t = cayley(z, "reflected")
    assert np.max(np.abs(t[:, -1])) < 1e-12
    assert np.allclose(cayley_inverse(t, "reflected"), z, atol=1e-10)
    x = rng.standard_normal((20, 4)) * 0.2
    assert np.allclose(cayley_inverse(cayley(x, "literal"), "literal"), x, atol=1e-12)


def test_cayley_pole():
    with pytest.raises(PoleError):
        cayley(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        cayley(np.zeros(3), "upside-down")


def test_cayley_jacobian(rng):
    z = rng.standard_normal((8, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    for zeta in z:
        closed = float(cayley_jacobian(zeta))
        assert closed == pytest.approx(cayley_jacobian_clifford(zeta), rel=1e-12)
        assert cayley_jacobian_fd(zeta, "reflected") == pytest.approx(closed, abs=1e-6)
        assert cayley_jacobian_fd(zeta, "literal") == pytest.approx(closed, abs=1e-6)


def test_cayley_jacobian_south_pole():
    # |e_m zeta + 1| = 2 at zeta = -e_m, so J = 2^{-2m+2}
    assert float(cayley_jacobian(np.array([0.0, 0.0, -1.0]))) == pytest.approx(2.0**-4)


def test_cayley_rotation_conventions(rng):
    x = rng.standard_normal(3) * 0.4
    for conv in ("literal", "reflected"):
        R = cayley_rotation(x, conv)
        assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
    # the literal rotation is rev(e_m x + 1) u (e_m x + 1)/|.|^2, computed literally
    q = Multivector.basis_vector(3, 3) * Multivector.vector(x) + 1.0
    assert np.allclose(cayley_rotation(x, "literal"), sandwich_matrix(q), atol=1e-12)
    # the reflected rotation agrees with the composed Moebius transform
    assert np.allclose(cayley_rotation(x, "reflected"), cayley_transform(3, "reflected").rotation(x), atol=1e-12)
