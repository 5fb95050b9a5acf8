"""The bosonic Laplacian

    D_k = Delta_x - 4/(m+2k-2) <u,D_x><D_u,D_x> + 4/((m+2k-2)(m+2k-4)) |u|^2 <D_u,D_x>^2

applied exactly to :class:`~bosonic_bvp.harmonic.MultiPoly` fields and by
second-order central differences in x to general H_k-valued fields.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
import sympy

from .errors import DimensionMismatch, DomainError, GuardError
from .harmonic import HarmonicBasis, MultiPoly, expand_in_basis, homogeneous_exponents, harmonic_basis
from .quadrature import sphere_rule

DOMAINS = ("half-space", "ball", "all-space")
DEFAULT_STEP = 1e-3


def dk_constants(m: int, k: int, allow_k0: bool = False) -> tuple[Fraction, Fraction]:
    """(a, b) with D_k = Delta_x - a <u,D_x><D_u,D_x> + b |u|^2 <D_u,D_x>^2."""
    if m < 3:
        raise DomainError(f"D_k needs m >= 3, got {m}")
    if k < 0 or (k == 0 and not allow_k0):
        raise DomainError(f"D_k needs k >= 1 (k=0 only with allow_k0), got k={k}")
    if m + 2 * k - 4 == 0:
        raise DomainError(f"m+2k-4 vanishes for m={m}, k={k}")
    return Fraction(4, m + 2 * k - 2), Fraction(4, (m + 2 * k - 2) * (m + 2 * k - 4))


def _mixed(p: MultiPoly) -> MultiPoly:
    """<D_u, D_x> p = sum_j d^2 p / du_j dx_j."""
    return sum((p.partial_x(j).partial_u(j) for j in range(1, p.m + 1)), MultiPoly(p.m))


def _u_dot_dx(p: MultiPoly) -> MultiPoly:
    """<u, D_x> p = sum_j u_j dp/dx_j."""
    return sum((MultiPoly.u(p.m, j) * p.partial_x(j) for j in range(1, p.m + 1)), MultiPoly(p.m))


def apply_Dk_poly(p: MultiPoly, m: int, k: int, allow_k0: bool = False) -> MultiPoly:
    """Exact D_k p.  Rational coefficients in, rational coefficients out."""
    if p.m != m:
        raise DimensionMismatch(f"polynomial in m={p.m}, operator in m={m}")
    a, b = dk_constants(m, k, allow_k0)
    mixed = _mixed(p)
    return p.laplacian_x() - _u_dot_dx(mixed) * a + MultiPoly.u_norm_sq(m) * _mixed(mixed) * b


@dataclass(frozen=True)
class MaxwellReport:
    agrees: bool
    third_term_vanishes: bool
    full: MultiPoly
    two_term: MultiPoly


def maxwell_reduction_check(m: int, p: MultiPoly) -> MaxwellReport:
    """Compare D_1 p with the two-term form Delta_x p - (4/m) <u,D_x><D_u,D_x> p."""
    full = apply_Dk_poly(p, m, 1)
    mixed = _mixed(p)
    two = p.laplacian_x() - _u_dot_dx(mixed) * Fraction(4, m)
    third = _mixed(mixed)
    if p.u_degree() > 1:
        raise DomainError("the reduction applies to fields of degree 1 in u")
    return MaxwellReport(full == two, third.is_zero(), full, two)


# ---------------------------------------------------------------------------
# H_k-valued fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldHk:
    """F(x, u) = sum_j g_j(x) phi_j(u).

    ``coefficients`` maps an (N, m) array of points to an (N, t) array.
    """

    basis: HarmonicBasis
    coefficients: Callable[[np.ndarray], np.ndarray]
    domain: str = "all-space"
    radius: float = 1.0
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown field domain {self.domain!r}")

    @property
    def m(self) -> int:
        return self.basis.m

    @property
    def k(self) -> int:
        return self.basis.k

    def coeffs(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.m)
        out = np.asarray(self.coefficients(flat), dtype=float).reshape(flat.shape[0], self.basis.dim)
        return out.reshape(x.shape[:-1] + (self.basis.dim,))

    def __call__(self, x, nu) -> np.ndarray:
        """F(x, nu), broadcasting x (..., m) against nu (..., m)."""
        return np.sum(self.coeffs(x) * self.basis.evaluate(nu), axis=-1)

    def margin(self, x) -> float:
        """Distance from x to the boundary of the domain (inf for all-space)."""
        x = np.asarray(x, dtype=float)
        if self.domain == "half-space":
            return float(x[-1])
        if self.domain == "ball":
            return float(self.radius - np.linalg.norm(x))
        return float("inf")

    @classmethod
    def from_polynomial(cls, p: MultiPoly, k: int, label: str = "") -> "FieldHk":
        """Wrap a polynomial whose u-part lies in H_k for every x."""
        basis = harmonic_basis(p.m, k)
        groups: dict = {}
        for e, c in p.terms.items():
            xe, ue = e[: p.m], e[p.m:]
            groups.setdefault(xe, {})[(0,) * p.m + ue] = c
        xexps = sorted(groups)
        C = np.array([expand_in_basis(MultiPoly(p.m, groups[xe]), basis) for xe in xexps]).reshape(len(xexps), basis.dim)
        E = np.array(xexps, dtype=int).reshape(len(xexps), p.m)

        def coefficients(x):
            mons = np.ones((x.shape[0], E.shape[0]))
            for i in range(p.m):
                if np.any(E[:, i]):
                    mons *= x[:, i : i + 1] ** E[:, i][None, :]
            return mons @ C

        return cls(basis, coefficients, "all-space", label=label or "polynomial", meta={"polynomial": p})


@dataclass(frozen=True)
class FDResidual:
    value: float
    coefficients: np.ndarray
    norm: float
    step: float
    projection_defect: float


def _hessian_stencil(m: int, h: float) -> tuple[np.ndarray, list]:
    offsets = [np.zeros(m)]
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        offsets += [e, -e]
    pairs = list(itertools.combinations(range(m), 2))
    for i, l in pairs:
        for si, sl in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            e = np.zeros(m)
            e[i] = si * h
            e[l] = sl * h
            offsets.append(e)
    return np.array(offsets), pairs


def coefficient_hessian(F: FieldHk, x, h: float) -> np.ndarray:
    """Second-order central-difference Hessian of g_j at x, shape (m, m, t)."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    offs, pairs = _hessian_stencil(m, h)
    g = F.coeffs(x[None, :] + offs)
    H = np.empty((m, m, g.shape[1]))
    g0 = g[0]
    for i in range(m):
        H[i, i] = (g[1 + 2 * i] - 2.0 * g0 + g[2 + 2 * i]) / (h * h)
    base = 1 + 2 * m
    for n, (i, l) in enumerate(pairs):
        pp, pm, mp, mm = g[base + 4 * n : base + 4 * n + 4]
        H[i, l] = H[l, i] = (pp - pm - mp + mm) / (4.0 * h * h)
    return H


def dk_values_from_hessian(basis: HarmonicBasis, H: np.ndarray, u: np.ndarray, allow_k0: bool = False) -> np.ndarray:
    """D_k F(x, u) at points u given the x-Hessian H (m, m, t) of the coefficients at x."""
    m, k = basis.m, basis.k
    a, b = (float(c) for c in dk_constants(m, k, allow_k0))
    u = np.atleast_2d(u)
    lap = np.trace(H, axis1=0, axis2=1)
    val = basis.evaluate(u) @ lap
    grad = basis.gradient(u)  # (N, m, t)
    # <u,D_x><D_u,D_x> F = sum_{i,l} u_i H_il,j d_l phi_j
    val = val - a * np.einsum("ni,ilj,nlj->n", u, H, grad)
    if k >= 2:
        hess = basis.hessian(u)  # (N, m, m, t)
        val = val + b * np.sum(u * u, axis=1) * np.einsum("ilj,nilj->n", H, hess)
    return val


def apply_Dk_fd(F: FieldHk, x, nu, h: float = DEFAULT_STEP, allow_k0: bool = False) -> FDResidual:
    """D_k F(x, .) with exact u-derivatives and central x-differences of step h.

    Returns the value at ``nu`` and the H_k coefficient vector of the result,
    obtained by projection with a sphere rule of degree 2k.
    """
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if x.shape != (F.m,) or nu.shape != (F.m,):
        raise DimensionMismatch("x and nu must be vectors of length m")
    if h <= 0:
        raise DomainError("finite-difference step must be positive")
    if F.margin(x) < 2 * h:
        raise GuardError(f"point {x.tolist()} is within 2h={2 * h:g} of the {F.domain} boundary")
    H = coefficient_hessian(F, x, h)
    rule = sphere_rule(F.m, 2 * F.k)
    vals = dk_values_from_hessian(F.basis, H, rule.nodes, allow_k0)
    phi = F.basis.evaluate(rule.nodes)
    coeffs = phi.T @ (rule.weights * vals)
    defect = float(np.max(np.abs(phi @ coeffs - vals))) if vals.size else 0.0
    value = float(dk_values_from_hessian(F.basis, H, nu[None, :], allow_k0)[0])
    return FDResidual(value, coeffs, float(np.linalg.norm(coeffs)), h, defect)


def fd_convergence_ratio(F: FieldHk, x, nu, h: float = DEFAULT_STEP) -> tuple[float, FDResidual, FDResidual]:
    """|D_k F|(h) / |D_k F|(h/2) measured in the coefficient norm."""
    r1 = apply_Dk_fd(F, x, nu, h)
    r2 = apply_Dk_fd(F, x, nu, h / 2)
    return r1.norm / r2.norm, r1, r2


# ---------------------------------------------------------------------------
# exact null solutions
# ---------------------------------------------------------------------------


def polynomial_null_solutions(m: int, k: int, d: int) -> list[MultiPoly]:
    """Basis of the polynomials homogeneous of degree d in x, H_k-valued in u, with D_k p = 0."""
    basis = harmonic_basis(m, k)
    hk = [basis.exact_kernel_element(j) for j in range(basis.dim)]
    xmons = homogeneous_exponents(m, d)
    candidates = []
    for xe in xmons:
        xm = MultiPoly.monomial(m, xe)
        for phi in hk:
            candidates.append(xm * phi)
    images = [apply_Dk_poly(c, m, k) for c in candidates]
    keys = sorted({e for img in images for e in img.terms})
    if not keys:
        return candidates
    row = {e: i for i, e in enumerate(keys)}
    A = sympy.zeros(len(keys), len(candidates))
    for col, img in enumerate(images):
        for e, c in img.terms.items():
            A[row[e], col] = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
    out = []
    for vec in A.nullspace():
        p = MultiPoly(m)
        for c, cand in zip(vec, candidates):
            if c != 0:
                num, den = sympy.fraction(c)
                p = p + cand * Fraction(int(num), int(den))
        out.append(p)
    return out
