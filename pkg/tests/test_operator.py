from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bosonic_bvp.errors import DimensionMismatch, DomainError, GuardError
from bosonic_bvp.harmonic import MultiPoly, harmonic_basis
from bosonic_bvp.operator import (
    FieldHk,
    apply_Dk_fd,
    apply_Dk_poly,
    dk_constants,
    fd_convergence_ratio,
    maxwell_reduction_check,
    polynomial_null_solutions,
)
from bosonic_bvp.solver import kernel_field_half
from bosonic_bvp.suites import disjoint_variable_solution


def test_constants():
    assert dk_constants(3, 1) == (Fraction(4, 3), Fraction(4, 3))
    assert dk_constants(5, 2) == (Fraction(4, 7), Fraction(4, 35))
    with pytest.raises(DomainError):
        dk_constants(3, 0)
    assert dk_constants(5, 0, allow_k0=True) == (Fraction(4, 3), Fraction(4, 3))
    with pytest.raises(DomainError):
        dk_constants(4, 0, allow_k0=True)  # m + 2k - 4 = 0
    with pytest.raises(DomainError):
        dk_constants(2, 1)


def test_hand_computed_example():
    # D_1 (x_1^2 u_1) in m=3: 2 u_1 - (4/3) * 2 u_1 = -(2/3) u_1
    m = 3
    p = MultiPoly.x(m, 1) * MultiPoly.x(m, 1) * MultiPoly.u(m, 1)
    assert apply_Dk_poly(p, m, 1) == MultiPoly.u(m, 1) * Fraction(-2, 3)


def test_disjoint_variable_field_is_null():
    # x_1 x_2 times an H_k element in u_3, u_4 only
    for k in (1, 2, 3):
        assert apply_Dk_poly(disjoint_variable_solution(4, k), 4, k).is_zero()


def test_disjoint_solution_needs_m4():
    with pytest.raises(ValueError):
        disjoint_variable_solution(3, 1)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_Dk_poly(MultiPoly.x(4, 1), 3, 1)


def test_maxwell_reduction():
    m = 3
    x1, x2, u1, u2 = MultiPoly.x(m, 1), MultiPoly.x(m, 2), MultiPoly.u(m, 1), MultiPoly.u(m, 2)
    p = x1 * x2 * u1 + x1 * x1 * u2
    rep = maxwell_reduction_check(m, p)
    assert rep.agrees and rep.third_term_vanishes
    with pytest.raises(DomainError):
        maxwell_reduction_check(m, x1 * u1 * u2)


@pytest.mark.parametrize("m,k,d", [(3, 1, 1), (3, 2, 2), (4, 1, 2)])
def test_polynomial_null_solutions(m, k, d):
    sols = polynomial_null_solutions(m, k, d)
    assert sols
    for p in sols:
        assert apply_Dk_poly(p, m, k).is_zero()
        assert p.is_u_homogeneous(k)


def test_degree_one_solutions_are_everything():
    # D_k kills every field linear in x, so the null space is the full product space
    m, k = 3, 2
    assert len(polynomial_null_solutions(m, k, 1)) == m * harmonic_basis(m, k).dim


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_linearity(a, b):
    m, k = 3, 1
    p = MultiPoly.x(m, 1) * MultiPoly.x(m, 2) * MultiPoly.u(m, 3)
    q = MultiPoly.x(m, 3) * MultiPoly.x(m, 3) * MultiPoly.u(m, 1)
    lhs = apply_Dk_poly(p * a + q * b, m, k)
    rhs = apply_Dk_poly(p, m, k) * a + apply_Dk_poly(q, m, k) * b
    assert lhs == rhs


def test_fd_matches_exact_on_polynomial(rng):
    m, k = 3, 2
    B = harmonic_basis(m, k)
    x1, x2, x3 = (MultiPoly.x(m, i) for i in (1, 2, 3))
    p = x1 * x2 * x3 * B.exact_kernel_element(1) + x1 * x1 * B.exact_kernel_element(3)
    F = FieldHk.from_polynomial(p, k)
    exact = apply_Dk_poly(p, m, k)
    x = np.array([0.3, -0.2, 0.5])
    nu = np.array([0.0, 0.6, 0.8])
    res = apply_Dk_fd(F, x, nu, 1e-3)
    assert res.value == pytest.approx(float(exact.evaluate(x, nu)), abs=1e-6)
    assert res.projection_defect < 1e-8


def test_fd_residual_of_kernel_field_is_second_order():
    B = harmonic_basis(3, 1)
    F = kernel_field_half(B, np.array([0.1, 0.0]), np.array([0.0, 0.0, 1.0]))
    ratio, r1, r2 = fd_convergence_ratio(F, np.array([0.2, 0.1, 0.8]), np.array([1.0, 0, 0]), 1e-2)
    assert 3.9 < ratio < 4.1
    assert r1.norm < 1e-2


def test_fd_guard():
    B = harmonic_basis(3, 1)
    F = kernel_field_half(B, np.zeros(2), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(GuardError):
        apply_Dk_fd(F, np.array([0, 0, 1e-3]), np.array([1.0, 0, 0]), 1e-3)
    with pytest.raises(DomainError):
        apply_Dk_fd(F, np.array([0, 0, 0.5]), np.array([1.0, 0, 0]), 0.0)


def test_field_margins():
    B = harmonic_basis(3, 1)
    F = FieldHk(B, lambda x: np.zeros((len(x), 3)), "ball", radius=2.0)
    assert F.margin(np.array([1.0, 0, 0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        FieldHk(B, lambda x: x, "torus")


def test_fd_residual_of_exact_null_solution():
    F = FieldHk.from_polynomial(disjoint_variable_solution(5, 2), 2)
    x = np.array([0.3, -0.2, 0.1, 0.4, 0.5])
    nu = np.array([0.0, 0.0, 0.6, 0.8, 0.0])
    assert apply_Dk_fd(F, x, nu, 1e-3).norm < 1e-8
