import math

import numpy as np
import pytest

from bosonic_bvp.errors import DecayError, DomainError, GuardError, QuadratureError
from bosonic_bvp.harmonic import harmonic_basis
from bosonic_bvp.operator import FieldHk
from bosonic_bvp.quadrature import hyperplane_rule, sphere_rule
from bosonic_bvp.solver import (
    BoundaryDatum,
    RuleSettings,
    action_matrices,
    ball_lp_bound_ratio,
    ball_sphere_factor,
    boundary_convergence_report,
    bump_datum,
    cauchy_estimate_probe,
    change_of_variables_error,
    conformal_transfer_check,
    constant_datum,
    exponential_datum,
    fiber_lp,
    gaussian_datum,
    halfspace_convergence_report,
    kernel_field_half,
    lp_norm,
    mean_value_check,
    poisson_ball_direct,
    poisson_coefficients_ball,
    poisson_coefficients_half,
    poisson_integral_ball,
    poisson_integral_half,
    polynomial_datum,
    solution_field_ball,
    sphere_average,
    volume_mean_value_check,
)

NU = np.array([0.48, 0.6, 0.64])
EXP_DIRECTIONS = [[0.3, -0.2, 0.5], [0.1, 0.4, 0.0], [-0.5, 0.2, 0.3]]

# frozen from scipy.integrate.nquad on the unreduced kernel integrals
P_H_ORACLE = 0.28052282614955265
P_B_ORACLE = 0.22890858773500883


@pytest.fixture(scope="module")
def B31():
    return harmonic_basis(3, 1)


def test_half_space_frozen_oracle(B31):
    f = gaussian_datum(B31, [1.0, 0.5, -0.25], center=[0.2, -0.1], width=1.0)
    val = poisson_integral_half(f, np.array([0.1, 0.3, 0.4]), NU)
    assert val == pytest.approx(P_H_ORACLE, abs=1e-8)


def test_ball_frozen_oracle(B31):
    h = exponential_datum(B31, [0.7, -0.3, 0.2], EXP_DIRECTIONS)
    val = poisson_integral_ball(h, np.array([0.2, -0.3, 0.5]), NU)
    assert val == pytest.approx(P_B_ORACLE, abs=1e-8)


def test_ball_reduced_matches_direct_double_integral(B31):
    h = exponential_datum(B31, [0.7, -0.3, 0.2], EXP_DIRECTIONS)
    x = np.array([0.1, 0.2, -0.3])
    direct = poisson_ball_direct(h, x, NU, sphere_rule(3, 40))
    assert poisson_integral_ball(h, x, NU) == pytest.approx(direct, abs=1e-10)


@pytest.mark.parametrize("m,k", [(3, 1), (3, 2), (4, 1)])
def test_constant_datum_reproduced_in_ball(m, k):
    B = harmonic_basis(m, k)
    c = np.arange(1, B.dim + 1, dtype=float) / B.dim
    h = constant_datum(B, c)
    for x in (np.zeros(m), np.full(m, 0.3), np.eye(m)[0] * 0.95):
        assert np.allclose(poisson_coefficients_ball(h, x), c, atol=1e-9)


def test_constant_datum_reproduced_in_half_space(B31):
    c = [0.2, -0.4, 1.0]
    f = constant_datum(B31, c, domain="hyperplane")
    got = poisson_coefficients_half(f, np.array([0.3, 0.1, 0.5]), RuleSettings(radial_order=24))
    assert np.allclose(got, c, atol=1e-6)


def test_zero_datum_gives_zero(B31):
    f = gaussian_datum(B31, [0.0, 0.0, 0.0])
    assert np.all(poisson_coefficients_half(f, np.array([0, 0, 1.0])) == 0)


def test_linearity_in_the_datum(B31):
    f = gaussian_datum(B31, [1.0, 0.0, 0.5], center=[0.1, 0.0])
    x = np.array([0.0, 0.2, 0.3])
    a = poisson_coefficients_half(f, x)
    assert np.allclose(poisson_coefficients_half(f.scaled(-2.5), x), -2.5 * a, atol=1e-13)


def test_rotation_equivariance_in_ball(B31, rng):
    # P_B[h o Q](Q^T x) with h rotated consistently: the solution for a rotated datum is the rotated solution
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    h = exponential_datum(B31, [0.7, -0.3, 0.2], EXP_DIRECTIONS)
    A = action_matrices(B31, Q)
    rot = BoundaryDatum(B31, "sphere", lambda z: h.coeffs(z @ Q.T) @ A)
    x = np.array([0.2, -0.1, 0.3])
    lhs = poisson_coefficients_ball(rot, Q.T @ x)
    rhs = poisson_coefficients_ball(h, x) @ A
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_guards(B31):
    h = constant_datum(B31, [1, 0, 0])
    with pytest.raises(DomainError):
        poisson_coefficients_ball(h, np.array([1.0, 0, 0]))
    with pytest.raises(GuardError):
        poisson_coefficients_ball(h, np.array([0.9995, 0, 0]))
    f = gaussian_datum(B31, [1, 0, 0])
    with pytest.raises(GuardError):
        poisson_coefficients_half(f, np.array([0.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        poisson_coefficients_half(h, np.array([0.0, 0.0, 1.0]))


def test_decay_declarations(B31):
    slow = BoundaryDatum(B31, "hyperplane", lambda t: np.tile([1.0, 0, 0], (len(t), 1)) / (1 + np.sum(t**2, 1))[:, None] ** 0.5,
                         regularity="lp", decay=(1.0, 1.0), label="slow")
    with pytest.raises(DecayError, match="violates"):
        poisson_coefficients_half(slow, np.array([0, 0, 0.5]))
    undeclared = BoundaryDatum(B31, "hyperplane", lambda t: np.zeros((len(t), 3)), regularity="lp")
    with pytest.raises(DecayError, match="declares no decay"):
        poisson_coefficients_half(undeclared, np.array([0, 0, 0.5]))
    g = gaussian_datum(B31, [1.0, 2.0, 0.0], center=[3.0, 0.0], width=0.5)
    assert g.check_decay(hyperplane_rule(3, 20, 8, scale=0.5, center=[3.0, 0.0])) <= 1.0


def test_polynomial_and_bump_data(B31):
    p = polynomial_datum(B31, [[1, 0, 0], [0, 2, 0]], [[1, 0, 0], [0, 0, 2]])
    z = np.array([[0.6, 0.0, 0.8]])
    assert np.allclose(p.coeffs(z), [[0.6, 2 * 0.64, 0.0]])
    b = bump_datum(B31, [1, 0, 0], radius=0.5)
    assert np.allclose(b.coeffs(np.array([[0.6, 0.0], [0.0, 0.0]])), [[0, 0, 0], [1, 0, 0]])
    with pytest.raises(DomainError):
        bump_datum(B31, [1, 0, 0], radius=0.0)


def test_projection_of_raw_callable(B31):
    # f(t, w) = e^{-|t|^2} <w, e_1> lies in H_1 for every t
    def f(t, w):
        return np.exp(-np.sum(t**2, axis=1)) * w[:, 0]

    d = BoundaryDatum.project(f, B31, "hyperplane", sample_points=np.zeros((1, 2)))
    assert d.projection_defect < 1e-12
    assert np.allclose(d(np.zeros((1, 2)), np.array([[1.0, 0, 0]])), 1.0)


# -- L^p --------------------------------------------------------------------


def test_ball_sphere_factor():
    # integer kp: the radial Gauss-Jacobi rule is exact
    for m, k, p in ((3, 1, 2), (4, 2, 3), (5, 1, 1)):
        assert ball_sphere_factor(harmonic_basis(m, k), p) == pytest.approx(1 / (m + k * p), rel=1e-12)
    # fractional kp: rho^{kp} is not polynomial, so only close
    assert ball_sphere_factor(harmonic_basis(5, 1), 1.5) == pytest.approx(1 / 6.5, rel=1e-7)


def test_fiber_l2_is_coefficient_norm(B31, rng):
    C = rng.standard_normal((4, 3))
    assert np.allclose(fiber_lp(B31, C, 2), np.sum(C**2, axis=1))
    # the sup is sampled on rule nodes: never above the true max, and close to it
    exact = np.linalg.norm(C, axis=1) * math.sqrt(3 / (4 * math.pi))
    sup = fiber_lp(B31, C, math.inf)
    assert np.all(sup <= exact * (1 + 1e-12)) and np.all(sup >= 0.97 * exact)


def test_lp_norm_of_gaussian(B31):
    # ||c e^{-|t|^2}||_2^2 = |c|^2 int e^{-2|t|^2} dt = |c|^2 pi/2
    f = gaussian_datum(B31, [1.0, 2.0, 2.0])
    assert lp_norm(f, 2) == pytest.approx(3 * math.sqrt(math.pi / 2), rel=1e-8)
    assert lp_norm(f.scaled(2.0), 3) == pytest.approx(2 * lp_norm(f, 3), rel=1e-12)
    with pytest.raises(DomainError):
        lp_norm(f, 0.5)


def test_lp_norm_rejects_heavy_tails(B31):
    heavy = BoundaryDatum(B31, "hyperplane", lambda t: np.tile([1.0, 0, 0], (len(t), 1)) / (1 + np.sum(t**2, 1))[:, None] ** 0.6)
    with pytest.raises(QuadratureError, match="tail mass"):
        lp_norm(heavy, 2)


def test_boundary_convergence_report(B31):
    h = exponential_datum(B31, [0.7, -0.3, 0.2], EXP_DIRECTIONS)
    rows = boundary_convergence_report(h, 2, [0.0, 0.5, 0.9], outer_degree=12)
    errs = [r.error for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    with pytest.raises(DomainError):
        boundary_convergence_report(h, 2, [0.5, 0.2])
    with pytest.raises(DomainError):
        boundary_convergence_report(h, 2, [0.5, 1.0])


def test_ball_bound_ratio_at_most_one(B31):
    h = exponential_datum(B31, [0.7, -0.3, 0.2], EXP_DIRECTIONS)
    for r in (0.0, 0.5, 0.9):
        assert ball_lp_bound_ratio(h, 2, r, outer_degree=12) <= 1.0 + 1e-9


@pytest.mark.slow
def test_halfspace_convergence_report(B31):
    f = gaussian_datum(B31, [1.0, 0.5, -0.25], width=1.0)
    outer = hyperplane_rule(3, 10, 8, scale=1.0)
    rows = halfspace_convergence_report(f, 2, [0.5, 0.1], outer=outer)
    assert rows[1].error < rows[0].error
    with pytest.raises(DomainError):
        halfspace_convergence_report(f, 2, [0.0])


# -- mean value, conformal, Cauchy -------------------------------------------


def test_mean_value_on_kernel_field():
    B = harmonic_basis(3, 2)
    F = kernel_field_half(B, np.array([0.1, -0.2]), np.array([0.0, 0.6, 0.8]))
    a, nu = np.array([0.0, 0.1, 1.0]), np.array([1.0, 0, 0])
    assert mean_value_check(F, a, 0.5, nu, sphere_rule(3, 40)) < 1e-9
    assert volume_mean_value_check(F, a, 0.5, nu) < 1e-7
    assert sphere_average(F, a, 0.5, nu, sphere_rule(3, 40)) == pytest.approx(float(F(a, nu)), abs=1e-9)
    with pytest.raises(GuardError):
        mean_value_check(F, a, 1.5, nu)


def test_mean_value_on_ball_solution(B31):
    h = exponential_datum(B31, [0.7, -0.3, 0.2], EXP_DIRECTIONS)
    F = solution_field_ball(h, RuleSettings(sphere_degree=24))
    assert mean_value_check(F, np.zeros(3), 0.3, NU, sphere_rule(3, 8)) < 1e-6
    assert F.provenance["kind"] == "ball"


def test_conformal_transfer(B31):
    f = gaussian_datum(B31, [1.0, 0.5, -0.25], center=[0.2, -0.1], width=1.0)
    rep = conformal_transfer_check(f, np.array([[0.1, 0.2, -0.1], [0.0, -0.3, 0.2]]))
    assert rep.max_deviation < 1e-5
    assert rep.jacobian_fd_error < 1e-6
    assert rep.change_of_variables_error < 1e-5
    with pytest.raises(DomainError):
        conformal_transfer_check(f, np.zeros((1, 3)), convention="literal")


def test_change_of_variables_other_dimension():
    assert change_of_variables_error(4, degree=40) < 1e-4


def test_cauchy_probe_constant_field_has_zero_ratio(B31):
    F = FieldHk(B31, lambda x: np.tile([1.0, 0.0, 0.0], (len(x), 1)))
    rows = cauchy_estimate_probe(F, np.zeros(3), NU, [0.5, 1.0])
    assert all(r.ratio < 1e-9 for r in rows)


def test_cauchy_probe_linear_field_ratio_scales_with_r(B31):
    # F = x_1 phi_1: gradient is constant and the sup grows like r, so the ratio is fixed
    F = FieldHk(B31, lambda x: x[:, :1] * np.array([[1.0, 0.0, 0.0]]))
    rows = cauchy_estimate_probe(F, np.zeros(3), np.array([1.0, 0, 0]), [0.25, 0.5, 1.0])
    assert rows[0].ratio == pytest.approx(rows[1].ratio, rel=1e-6)
    assert rows[1].ratio == pytest.approx(rows[2].ratio, rel=1e-6)
