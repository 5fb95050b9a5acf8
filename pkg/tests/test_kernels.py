import math

import numpy as np
import pytest

from bosonic_bvp.errors import DimensionMismatch, DomainError, GuardError
from bosonic_bvp.harmonic import harmonic_basis, omega
from bosonic_bvp.kernels import (
    KernelConstants,
    PointHalfSpace,
    ball_poisson_classical,
    c_mk,
    half_tail_mass_exact,
    kernel_coefficients_half,
    poisson_ball,
    poisson_half,
)
from bosonic_bvp.quadrature import hyperplane_rule, integrate, sphere_rule
from bosonic_bvp.solver import RuleSettings, tail_mass
from bosonic_bvp.suites import half_normalization_error

from conftest import unit_vectors

# frozen from scipy.integrate.quad on the radial integral
TAIL_ORACLE = {(0.3, 0.5): 2.5724787771376327, (1.0, 0.2): 4.902903378454601}


def test_constants():
    assert c_mk(3, 1) == pytest.approx(2 * 3 / (4 * math.pi))
    K = KernelConstants(4, 2)
    assert K.c_mk == pytest.approx(2 * 6 / (2 * 2 * math.pi**2))
    assert K.dim == 9
    d = K.as_dict()
    assert d["omega_m"] == pytest.approx(omega(4))
    with pytest.raises(DomainError):
        KernelConstants(2, 1)
    with pytest.raises(DomainError):
        KernelConstants(3, -1)


def test_point_half_space():
    p = PointHalfSpace.from_vector([0.1, 0.2, 0.5])
    assert p.m == 3 and p.y == 0.5
    assert np.allclose(p.vector(), [0.1, 0.2, 0.5])
    with pytest.raises(DomainError):
        PointHalfSpace((0.0, 0.0), 0.0)


def test_half_kernel_guards():
    with pytest.raises(DomainError):
        poisson_half([0, 0, -0.1], [0, 0], [1, 0, 0], [1, 0, 0], 1)
    with pytest.raises(DimensionMismatch):
        poisson_half([0, 0, 0.1], [0, 0, 0], [1, 0, 0], [1, 0, 0], 1)


def test_ball_kernel_guards():
    with pytest.raises(DomainError):
        poisson_ball([1.0, 0, 0], [0, 0, 1.0], [1, 0, 0], [1, 0, 0], 1)


def test_half_kernel_batches_agree_with_loops(rng):
    x = np.array([0.2, -0.1, 0.7])
    tp = rng.standard_normal((6, 2))
    u, v = unit_vectors(rng, 2, 3)
    batch = poisson_half(x, tp, u, v, 2)
    single = [poisson_half(x, t, u, v, 2) for t in tp]
    assert np.allclose(batch, single)
    B = harmonic_basis(3, 2)
    C = kernel_coefficients_half(x, tp, u, B)
    assert np.allclose(C @ B.evaluate(v), batch)


@pytest.mark.parametrize("m,k", [(3, 1), (3, 3), (4, 2)])
def test_half_kernel_normalization(m, k, rng):
    assert half_normalization_error(m, k, 3, rng) < 1e-8


def test_ball_kernel_reproduces_constant_in_nu(rng):
    # int int P_B(x, zeta, w, nu) phi(w) dS(w) dS(zeta) = phi(nu) for phi in H_k
    m, k = 3, 2
    B = harmonic_basis(m, k)
    x = np.array([0.2, -0.1, 0.3])
    nu = unit_vectors(rng, 1, m)[0]
    Z = sphere_rule(m, 40)
    W = sphere_rule(m, 2 * k + 2)
    phi0 = lambda w: B.evaluate(w)[..., 0]
    val = integrate(Z, lambda z: (poisson_ball(x, z[:, None, :], W.nodes[None], nu, k) * phi0(W.nodes)[None]) @ W.weights)
    assert val == pytest.approx(float(phi0(nu)), abs=1e-8)


def test_classical_factor_integrates_to_omega():
    x = np.array([0.1, 0.2, -0.3, 0.1])
    rule = sphere_rule(4, 40)
    assert rule.weights @ ball_poisson_classical(x, rule.nodes) == pytest.approx(omega(4), rel=1e-9)


@pytest.mark.parametrize("y,delta", list(TAIL_ORACLE))
def test_tail_closed_form_matches_frozen_oracle(y, delta):
    assert half_tail_mass_exact(3, 2, y, delta) == pytest.approx(TAIL_ORACLE[(y, delta)], rel=1e-12)


def test_tail_closed_form_against_quadrature():
    m, k, y, delta = 4, 1, 0.4, 0.3
    rule = hyperplane_rule(m, 40, 4, scale=y, breakpoints=[delta, 2 * delta, 4 * delta])
    r = np.linalg.norm(rule.nodes, axis=1)
    keep = r > delta
    val = np.sum(rule.weights[keep] * c_mk(m, k) * y / (r[keep] ** 2 + y**2) ** (m / 2))
    assert val == pytest.approx(half_tail_mass_exact(m, k, y, delta), rel=1e-8)


def test_tail_mass_signed_and_absolute():
    v = np.array([0.0, 0.6, 0.8])
    signed, ab = tail_mass(3, 1, np.zeros(2), 0.3, 0.5, v, RuleSettings(), u_degree=40)
    closed = half_tail_mass_exact(3, 1, 0.3, 0.5)
    assert abs(signed) < 1e-10
    # int |Z_1(u, v)| dS(u) = 3/(4 pi) int |<u, v>| dS = 3/2
    assert ab == pytest.approx(1.5 * closed, rel=2e-3)


def test_tail_mass_decreases_towards_boundary():
    v = np.array([1.0, 0.0, 0.0])
    vals = [tail_mass(3, 2, np.zeros(2), y, 0.5, v)[1] for y in (0.4, 0.2, 0.1, 0.05)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_singular_point_guard():
    with pytest.raises(GuardError):
        poisson_ball([0.5, 0, 0], [0.5, 0, 0], [1, 0, 0], [1, 0, 0], 1)


@pytest.mark.parametrize("m", [3, 4, 5])
def test_k0_reductions(m):
    # c_{m,0} omega_m / 2 = 1, and both kernels reduce to the classical normalised ones
    assert c_mk(m, 0) * omega(m) / 2 == pytest.approx(1.0, rel=1e-14)
    y = 0.7
    rule = hyperplane_rule(m, 40, 4, scale=y, breakpoints=[y, 2 * y, 4 * y])
    e = np.eye(m)[0]
    # Z_0 = 1/omega_m, so the u-integral over S^{m-1} supplies the remaining factor omega_m
    val = integrate(rule, lambda tp: poisson_half(np.append(np.zeros(m - 1), y), tp, e, e, 0))
    assert val * omega(m) == pytest.approx(1.0, rel=1e-9)
    # int y/|x - t|^m dt' = omega_m / 2 for any y
    raw = integrate(rule, lambda tp: y / (np.sum(tp**2, axis=1) + y**2) ** (m / 2))
    assert raw == pytest.approx(omega(m) / 2, rel=1e-9)
    x = np.full(m, 0.2)
    S = sphere_rule(m, 40)
    assert integrate(S, lambda z: poisson_ball(x, z, e, e, 0)) * omega(m) == pytest.approx(1.0, abs=1e-6)
