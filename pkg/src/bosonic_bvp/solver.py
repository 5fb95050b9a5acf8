"""Poisson integrals on the half-space and the ball, L^p norms, and verification probes.

Both Poisson integrals use the reduced form in which the inner S^{m-1}
integral over u has been carried out analytically:

    P_H[f](x, nu) = c_{m,k} int y/|x-t|^m f(t', R_{x-t} nu) dt'
    P_B[h](x, nu) = (c_{m,k}/2) int (1-|x|^2)/|x-zeta|^m h(zeta, R_{x-zeta} nu) dS(zeta)

with R_a nu = a nu a/|a|^2.  Results are returned as H_k coefficient vectors
(projection in nu with a sphere rule of degree 2k, which is exact because
the result lies in H_k).
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .clifford import cayley, cayley_jacobian, cayley_rotation, reflect
from .errors import DecayError, DimensionMismatch, DomainError, GuardError, QuadratureError
from .harmonic import HarmonicBasis, harmonic_basis, omega
from .kernels import KernelConstants, poisson_ball
from .operator import FieldHk, apply_Dk_fd
from .quadrature import (
    QuadratureRule,
    ball_rule,
    focused_sphere_rule,
    graded_breakpoints,
    hyperplane_rule,
    integrate,
    sphere_rule,
)

BALL_GUARD = 1e-3


@dataclass(frozen=True)
class RuleSettings:
    """Quadrature parameters for Poisson-integral evaluation.

    Half-space: polar rule about x' with geometric radial panels from
    min(y, data scale) out to the data reach, ``radial_order`` points each.
    Ball: plain sphere rule of ``sphere_degree`` for |x| < ``focus_threshold``,
    otherwise a rule graded toward x/|x| with first panel width 1 - |x|.
    """

    radial_order: int = 20
    angular_degree: int = 40
    sphere_degree: int = 48
    panel_order: int = 16
    focus_threshold: float = 0.5
    ratio: float = 2.0
    reach_factor: float = 4.0
    guard: float = BALL_GUARD
    workers: int | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# ---------------------------------------------------------------------------
# boundary data
# ---------------------------------------------------------------------------

BOUNDARY_DOMAINS = ("hyperplane", "sphere")


@dataclass(frozen=True, eq=False)
class BoundaryDatum:
    """f(zeta, w) = sum_j g_j(zeta) phi_j(w) on R^{m-1} (hyperplane) or S^{m-1} (sphere).

    ``decay`` = (C, eps) declares |g_j(t')| <= C (1+|t'|)^{-(m-1+eps)}; it is
    required for L^p data on the hyperplane and verified on outer rule nodes.
    ``scale`` and ``center`` describe where the data lives and steer rule
    construction.
    """

    basis: HarmonicBasis
    domain: str
    coefficients: Callable[[np.ndarray], np.ndarray]
    regularity: str = "continuous-bounded"
    p: float | None = None
    decay: tuple | None = None
    scale: float = 1.0
    center: tuple | None = None
    bound: float | None = None
    label: str = ""
    projection_defect: float = 0.0

    def __post_init__(self):
        if self.domain not in BOUNDARY_DOMAINS:
            raise ValueError(f"unknown boundary domain {self.domain!r}")
        if self.regularity not in ("continuous-bounded", "lp"):
            raise ValueError(f"unknown regularity {self.regularity!r}")

    @property
    def m(self) -> int:
        return self.basis.m

    @property
    def k(self) -> int:
        return self.basis.k

    @property
    def boundary_dim(self) -> int:
        return self.m - 1 if self.domain == "hyperplane" else self.m

    def center_array(self) -> np.ndarray:
        if self.center is None:
            return np.zeros(self.boundary_dim)
        return np.asarray(self.center, dtype=float)

    def coeffs(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        flat = pts.reshape(-1, self.boundary_dim)
        out = np.asarray(self.coefficients(flat), dtype=float).reshape(flat.shape[0], self.basis.dim)
        return out.reshape(pts.shape[:-1] + (self.basis.dim,))

    def __call__(self, pts, w) -> np.ndarray:
        return np.sum(self.coeffs(pts) * self.basis.evaluate(w), axis=-1)

    def scaled(self, factor: float) -> "BoundaryDatum":
        g = self.coefficients
        return replace(self, coefficients=lambda t: factor * np.asarray(g(t)),
                       decay=None if self.decay is None else (abs(factor) * self.decay[0], self.decay[1]),
                       bound=None if self.bound is None else abs(factor) * self.bound,
                       label=f"{factor:g}*{self.label}")

    def __sub__(self, other: "BoundaryDatum") -> "BoundaryDatum":
        g1, g2 = self.coefficients, other.coefficients
        return replace(self, coefficients=lambda t: np.asarray(g1(t)) - np.asarray(g2(t)),
                       decay=None, bound=None, label=f"{self.label}-{other.label}")

    def check_decay(self, rule: QuadratureRule, outer_fraction: float = 0.5) -> float:
        """Verify the declared decay on nodes beyond ``outer_fraction`` of the rule's reach.

        Returns the largest observed ratio |g| / (C (1+|t'|)^{-(m-1+eps)}); raises
        :class:`DecayError` if it exceeds 1.
        """
        if self.domain != "hyperplane":
            return 0.0
        r = np.linalg.norm(rule.nodes - self.center_array(), axis=1)
        outer = rule.nodes[r >= outer_fraction * r.max()]
        g = np.max(np.abs(self.coeffs(outer)), axis=1)
        rr = np.linalg.norm(outer, axis=1)
        if self.decay is None:
            if self.regularity == "lp":
                raise DecayError(f"datum {self.label!r} declares no decay; L^p data on the hyperplane must")
            if self.bound is not None and np.any(g > self.bound * (1 + 1e-12)):
                raise DecayError(f"datum {self.label!r} exceeds its declared bound on outer nodes")
            return 0.0
        C, eps = self.decay
        envelope = C * (1.0 + rr) ** (-(self.m - 1 + eps))
        if not g.size or not np.any(g > 0):
            return 0.0
        ratio = float(np.max(g / envelope)) if C > 0 else math.inf
        if ratio > 1.0 + 1e-9:
            i = int(np.argmax(g / np.maximum(envelope, np.finfo(float).tiny)))
            raise DecayError(f"datum {self.label!r} violates its declared decay at t'={outer[i].tolist()} "
                             f"(|g|={g[i]:.3e}, envelope {envelope[i]:.3e})")
        return ratio

    @classmethod
    def project(cls, f: Callable, basis: HarmonicBasis, domain: str, degree: int | None = None,
                sample_points=None, **kwargs) -> "BoundaryDatum":
        """Project a raw callable f(points, w) onto H_k in w.

        The projection uses a sphere rule of ``degree`` (default 2k + 8); the
        defect max |f - sum g_j phi_j| is measured on ``sample_points`` if given.
        """
        rule = sphere_rule(basis.m, degree if degree is not None else 2 * basis.k + 8)
        phi = basis.evaluate(rule.nodes)
        W = rule.nodes

        def coefficients(pts):
            pts = np.asarray(pts, dtype=float)
            n = pts.shape[0]
            P = np.repeat(pts, W.shape[0], axis=0)
            Wr = np.tile(W, (n, 1))
            vals = np.asarray(f(P, Wr), dtype=float).reshape(n, W.shape[0])
            return (vals * rule.weights) @ phi

        defect = 0.0
        if sample_points is not None:
            pts = np.asarray(sample_points, dtype=float)
            c = coefficients(pts)
            n = pts.shape[0]
            P = np.repeat(pts, W.shape[0], axis=0)
            vals = np.asarray(f(P, np.tile(W, (n, 1))), dtype=float).reshape(n, -1)
            defect = float(np.max(np.abs(c @ phi.T - vals)))
        return cls(basis, domain, coefficients, projection_defect=defect, **kwargs)


def _coef_array(basis: HarmonicBasis, coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float).reshape(-1)
    if c.shape[0] != basis.dim:
        raise DimensionMismatch(f"expected {basis.dim} H_k coefficients, got {c.shape[0]}")
    return c


def constant_datum(basis: HarmonicBasis, coeffs, domain: str = "sphere") -> BoundaryDatum:
    c = _coef_array(basis, coeffs)
    return BoundaryDatum(basis, domain, lambda t: np.tile(c, (np.asarray(t).shape[0], 1)),
                         bound=float(np.max(np.abs(c))), label="constant")


def gaussian_datum(basis: HarmonicBasis, coeffs, center=None, width: float = 1.0,
                   domain: str = "hyperplane") -> BoundaryDatum:
    """g(t') = c exp(-|t' - center|^2 / width^2)."""
    c = _coef_array(basis, coeffs)
    d = basis.m - 1 if domain == "hyperplane" else basis.m
    ctr = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    if width <= 0:
        raise DomainError("Gaussian width must be positive")

    def coefficients(t):
        r2 = np.sum((np.asarray(t) - ctr) ** 2, axis=1)
        return np.exp(-r2 / width**2)[:, None] * c[None, :]

    eps = 1.0
    s = np.linspace(0.0, 10.0 * width + 10.0, 4001)
    A = float(np.max(np.abs(c)))
    C = A * float(np.max((1.0 + s + np.linalg.norm(ctr)) ** (basis.m - 1 + eps) * np.exp(-(s**2) / width**2)))
    return BoundaryDatum(basis, domain, coefficients, regularity="lp", decay=(C * 1.0001, eps), scale=width,
                         center=tuple(ctr.tolist()), bound=A, label="gaussian")


def bump_datum(basis: HarmonicBasis, coeffs, center=None, radius: float = 1.0,
               domain: str = "hyperplane") -> BoundaryDatum:
    """g(t') = c exp(1 - 1/(1 - rho^2)) for rho = |t' - center|/radius < 1, else 0."""
    c = _coef_array(basis, coeffs)
    d = basis.m - 1 if domain == "hyperplane" else basis.m
    ctr = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    if radius <= 0:
        raise DomainError("bump radius must be positive")

    def coefficients(t):
        rho2 = np.sum((np.asarray(t) - ctr) ** 2, axis=1) / radius**2
        out = np.zeros(rho2.shape)
        inside = rho2 < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
        return out[:, None] * c[None, :]

    A = float(np.max(np.abs(c)))
    C = A * (1.0 + np.linalg.norm(ctr) + radius) ** (basis.m)
    return BoundaryDatum(basis, domain, coefficients, regularity="lp", decay=(C, 1.0), scale=radius / 2,
                         center=tuple(ctr.tolist()), bound=A, label="bump")


def exponential_datum(basis: HarmonicBasis, coeffs, directions) -> BoundaryDatum:
    """Sphere datum g_j(zeta) = c_j exp(<a_j, zeta>), one direction a_j per coefficient."""
    c = _coef_array(basis, coeffs)
    A = np.asarray(directions, dtype=float).reshape(basis.dim, basis.m)

    def coefficients(z):
        return np.exp(np.asarray(z) @ A.T) * c[None, :]

    bound = float(np.max(np.abs(c) * np.exp(np.linalg.norm(A, axis=1))))
    return BoundaryDatum(basis, "sphere", coefficients, bound=bound, label="exponential")


def polynomial_datum(basis: HarmonicBasis, coeffs, exponents, domain: str = "sphere") -> BoundaryDatum:
    """g_j(zeta) = sum_n C[n, j] zeta^{E[n]} for monomial exponents E."""
    C = np.asarray(coeffs, dtype=float).reshape(-1, basis.dim)
    E = np.asarray(exponents, dtype=int).reshape(C.shape[0], -1)

    def coefficients(z):
        z = np.asarray(z, dtype=float)
        mons = np.prod(z[:, None, :] ** E[None, :, :], axis=2)
        return mons @ C

    if domain == "hyperplane":
        return BoundaryDatum(basis, domain, coefficients, label="polynomial")
    return BoundaryDatum(basis, domain, coefficients, bound=float(np.sum(np.abs(C))), label="polynomial")


def action_matrices(basis: HarmonicBasis, Q: np.ndarray) -> np.ndarray:
    """A with phi_j(Q u) = sum_l A[j, l] phi_l(u), for orthogonal Q of shape (..., m, m)."""
    rule = sphere_rule(basis.m, 2 * basis.k)
    Q = np.asarray(Q, dtype=float)
    QU = np.einsum("...ab,qb->...qa", Q, rule.nodes)
    phiQ = basis.evaluate(QU)  # (..., q, t)
    phi = basis.evaluate(rule.nodes)  # (q, t)
    return np.einsum("...qj,q,ql->...jl", phiQ, rule.weights, phi)


def cayley_pullback(f: BoundaryDatum, convention: str = "reflected") -> BoundaryDatum:
    """Sphere datum h(zeta, w) = |zeta - e_m|^{2-m} f(psi(zeta), R w) for the Cayley map psi.

    R is the orthogonal map of :func:`~bosonic_bvp.clifford.cayley_rotation`;
    under the reflected convention psi(S^{m-1}) is the hyperplane z_m = 0.
    """
    if f.domain != "hyperplane":
        raise DomainError("Cayley pull-back needs hyperplane data")
    m = f.m

    def coefficients(z):
        z = np.asarray(z, dtype=float)
        t = cayley(z, convention)[:, :-1]
        w = z.copy()
        w[:, -1] -= 1.0
        weight = np.sum(w * w, axis=1) ** ((2 - m) / 2)
        A = action_matrices(f.basis, cayley_rotation(z, convention))
        g = f.coeffs(t)
        return weight[:, None] * np.einsum("nj,njl->nl", g, A)

    return BoundaryDatum(f.basis, "sphere", coefficients, label=f"cayley({f.label})")


# ---------------------------------------------------------------------------
# Poisson integrals
# ---------------------------------------------------------------------------


def half_space_rule(datum: BoundaryDatum, x, settings: RuleSettings = RuleSettings()) -> QuadratureRule:
    """Polar rule about x' graded from min(y, data scale) out to the data reach."""
    x = np.asarray(x, dtype=float)
    xp, y = x[:-1], float(x[-1])
    L = datum.scale
    reach = float(np.linalg.norm(xp - datum.center_array())) + settings.reach_factor * L
    b0 = min(y, L)
    br = graded_breakpoints(b0, max(reach, settings.ratio * b0), settings.ratio)
    return hyperplane_rule(datum.m, settings.radial_order, settings.angular_degree,
                           scale=max(y, reach), center=xp, breakpoints=br)


def ball_rule_at(x, m: int, settings: RuleSettings = RuleSettings()) -> QuadratureRule:
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r < settings.focus_threshold:
        return sphere_rule(m, settings.sphere_degree)
    return focused_sphere_rule(m, x / r, 1.0 - r, settings.panel_order, settings.angular_degree, settings.ratio)


@lru_cache(maxsize=None)
def _fit_points(m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Fixed nu samples and the pseudo-inverse recovering H_k coefficients from values there.

    Every nu-sample function handled here lies in H_k, so least squares on
    2 dim(H_k) well-spread points recovers it exactly (up to rounding).
    """
    basis = harmonic_basis(m, k)
    rng = np.random.default_rng(20240611 + 97 * m + k)
    pts = rng.standard_normal((2 * basis.dim, m))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    phi = basis.evaluate(pts)
    if np.linalg.cond(phi) > 1e6:
        raise QuadratureError(f"ill-conditioned nu sample set for m={m}, k={k}")
    return pts, np.linalg.pinv(phi)


def _project_nu(basis: HarmonicBasis, values_fn: Callable, rule: QuadratureRule, workers=None) -> np.ndarray:
    """Coefficients of the H_k-valued integral whose nu-samples are produced by ``values_fn``."""
    pts, pinv = _fit_points(basis.m, basis.k)
    samples = integrate(rule, lambda nodes: values_fn(nodes, pts), workers=workers)
    return pinv @ np.atleast_1d(samples)


def _check_half_point(x, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (m,):
        raise DimensionMismatch(f"half-space point must have {m} coordinates")
    if not x[-1] > 0:
        raise GuardError(f"half-space point {x.tolist()} has y <= 0")
    return x


def poisson_coefficients_half(f: BoundaryDatum, x, settings: RuleSettings = RuleSettings(),
                              rule: QuadratureRule | None = None, check_decay: bool = True) -> np.ndarray:
    """H_k coefficient vector of P_H[f](x, .)."""
    if f.domain != "hyperplane":
        raise DomainError("half-space Poisson integral needs hyperplane data")
    m, basis = f.m, f.basis
    x = _check_half_point(x, m)
    rule = rule if rule is not None else half_space_rule(f, x, settings)
    if check_decay:
        f.check_decay(rule)
    c = KernelConstants(m, f.k).c_mk
    y = x[-1]

    def values(tp, nus):
        d = np.concatenate([x[:-1] - tp, np.full((tp.shape[0], 1), y)], axis=1)
        dist2 = np.sum(d * d, axis=1)
        K = c * y / dist2 ** (m / 2)
        g = f.coeffs(tp)  # (n, t)
        # f(t', R_d nu) for each node and each nu sample
        Rnu = nus[None, :, :] - 2.0 * (nus @ d.T).T[:, :, None] * d[:, None, :] / dist2[:, None, None]
        phi = basis.evaluate(Rnu)  # (n, q, t)
        return K[:, None] * np.einsum("nqj,nj->nq", phi, g)

    return _project_nu(basis, values, rule, settings.workers)


def poisson_coefficients_ball(h: BoundaryDatum, x, settings: RuleSettings = RuleSettings(),
                              rule: QuadratureRule | None = None) -> np.ndarray:
    """H_k coefficient vector of P_B[h](x, .)."""
    if h.domain != "sphere":
        raise DomainError("ball Poisson integral needs sphere data")
    m, basis = h.m, h.basis
    x = np.asarray(x, dtype=float)
    if x.shape != (m,):
        raise DimensionMismatch(f"ball point must have {m} coordinates")
    r = float(np.linalg.norm(x))
    if r >= 1.0:
        raise DomainError(f"point {x.tolist()} is not inside the unit ball")
    if 1.0 - r < settings.guard:
        raise GuardError(f"point {x.tolist()} is within the boundary guard 1-|x| >= {settings.guard:g}")
    rule = rule if rule is not None else ball_rule_at(x, m, settings)
    c = KernelConstants(m, h.k).c_mk
    r2 = r * r

    def values(z, nus):
        d = x - z
        dist2 = np.sum(d * d, axis=1)
        K = 0.5 * c * (1.0 - r2) / dist2 ** (m / 2)
        g = h.coeffs(z)
        Rnu = nus[None, :, :] - 2.0 * (nus @ d.T).T[:, :, None] * d[:, None, :] / dist2[:, None, None]
        phi = basis.evaluate(Rnu)
        return K[:, None] * np.einsum("nqj,nj->nq", phi, g)

    return _project_nu(basis, values, rule, settings.workers)


def poisson_integral_half(f: BoundaryDatum, x, nu, settings: RuleSettings = RuleSettings(), rule=None):
    """P_H[f](x, nu); ``nu`` may be a single vector or an (N, m) array."""
    coeffs = poisson_coefficients_half(f, x, settings, rule)
    return _combine(f.basis, coeffs, nu)


def poisson_integral_ball(h: BoundaryDatum, x, nu, settings: RuleSettings = RuleSettings(), rule=None):
    """P_B[h](x, nu); ``nu`` may be a single vector or an (N, m) array."""
    coeffs = poisson_coefficients_ball(h, x, settings, rule)
    return _combine(h.basis, coeffs, nu)


def _combine(basis: HarmonicBasis, coeffs: np.ndarray, nu):
    nu = np.asarray(nu, dtype=float)
    out = basis.evaluate(nu) @ coeffs
    return float(out) if out.ndim == 0 else out


def poisson_ball_direct(h: BoundaryDatum, x, nu, zeta_rule: QuadratureRule, w_degree: int | None = None) -> float:
    """P_B[h](x, nu) by the full double integral over (zeta, w), without the analytic reduction."""
    w_rule = sphere_rule(h.m, w_degree if w_degree is not None else 2 * h.k + 2)
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)

    def inner(z):
        K = poisson_ball(x[None, None, :], z[:, None, :], w_rule.nodes[None, :, :], nu, h.k)
        hv = h(np.repeat(z[:, None, :], w_rule.size, axis=1), w_rule.nodes[None, :, :])
        return (K * hv) @ w_rule.weights

    return integrate(zeta_rule, inner)


@dataclass(frozen=True, eq=False)
class SolutionField(FieldHk):
    """A :class:`FieldHk` produced by a Poisson integral, with its provenance."""

    provenance: dict = field(default_factory=dict)


def solution_field_half(f: BoundaryDatum, settings: RuleSettings = RuleSettings(), shift=None) -> SolutionField:
    """x -> P_H[f](x + shift, .) as a field on {x_m > -shift_m}."""
    sh = np.zeros(f.m) if shift is None else np.asarray(shift, dtype=float)

    def coefficients(X):
        return np.array([poisson_coefficients_half(f, xi + sh, settings) for xi in X]).reshape(len(X), f.basis.dim)

    return SolutionField(f.basis, coefficients, "half-space", label=f"P_H[{f.label}]",
                         meta={"shift": sh.tolist()},
                         provenance={"datum": f.label, "kind": "half-space", "rules": settings.as_dict()})


def solution_field_ball(h: BoundaryDatum, settings: RuleSettings = RuleSettings(), radius: float = 1.0) -> SolutionField:
    """x -> P_B[h](x/radius, .) as a field on B(0, radius)."""

    def coefficients(X):
        return np.array([poisson_coefficients_ball(h, xi / radius, settings) for xi in X]).reshape(len(X), h.basis.dim)

    return SolutionField(h.basis, coefficients, "ball", radius=radius, label=f"P_B[{h.label}]",
                         provenance={"datum": h.label, "kind": "ball", "radius": radius,
                                     "rules": settings.as_dict()})


def kernel_field_half(basis: HarmonicBasis, t_prime, u, shift: float = 0.0) -> FieldHk:
    """x -> P_H(x + shift e_m, t', u, .), a closed-form null solution of D_k."""
    t_prime = np.asarray(t_prime, dtype=float)
    u = np.asarray(u, dtype=float)
    m = basis.m
    c = KernelConstants(m, basis.k).c_mk

    def coefficients(X):
        X = np.asarray(X, dtype=float)
        d = np.concatenate([X[:, :-1] - t_prime, X[:, -1:] + shift], axis=1)
        if np.any(d[:, -1] <= 0):
            raise GuardError("kernel field evaluated outside its half-space")
        dist2 = np.sum(d * d, axis=1)
        return (c * d[:, -1] / dist2 ** (m / 2))[:, None] * basis.evaluate(reflect(d, u))

    dom = "half-space" if shift == 0.0 else "all-space"
    return FieldHk(basis, coefficients, dom, label="half-space kernel", meta={"shift": shift})


# ---------------------------------------------------------------------------
# L^p norms
# ---------------------------------------------------------------------------


def _fiber_rule_degree(k: int, p: float) -> int:
    if math.isfinite(p) and float(p).is_integer() and int(p) % 2 == 0:
        return int(k * p)
    return int(math.ceil(k * p)) + 16 if math.isfinite(p) else 2 * k + 8


def fiber_lp(basis: HarmonicBasis, C: np.ndarray, p: float, convention: str = "sphere",
             degree: int | None = None) -> np.ndarray:
    """int |sum_j C[n, j] phi_j(u)|^p over u in S^{m-1} (or B^m), per row n; p = inf gives the sup."""
    C = np.atleast_2d(C)
    if convention not in ("sphere", "ball"):
        raise ValueError(f"unknown fiber convention {convention!r}")
    rule = sphere_rule(basis.m, degree if degree is not None else _fiber_rule_degree(basis.k, p))
    vals = np.abs(C @ basis.evaluate(rule.nodes).T)  # (n, q)
    if not math.isfinite(p):
        return vals.max(axis=1)
    sphere = (vals**p) @ rule.weights
    if convention == "sphere":
        return sphere
    # u = rho w: integrate rho^{m-1} |f(rho w)|^p = rho^{m-1+kp} |f(w)|^p over rho in (0,1)
    n = int(math.ceil((basis.m - 1 + basis.k * p) / 2)) + 2
    s, ws = roots_jacobi(n, 0.0, float(basis.m - 1))
    rho = (1.0 + s) / 2.0
    wr = ws * 0.5**basis.m
    radial = float(np.sum(wr * rho ** (basis.k * p)))
    return radial * sphere


def lp_norm_from_coefficients(basis: HarmonicBasis, C: np.ndarray, weights: np.ndarray, p: float,
                              convention: str = "sphere", degree: int | None = None) -> float:
    inner = fiber_lp(basis, C, p, convention, degree)
    if not math.isfinite(p):
        return float(inner.max())
    total = integrate(QuadratureRule("sphere", basis.m, np.zeros((len(weights), 1)), np.asarray(weights, float)),
                      lambda _pts: inner)
    return float(total ** (1.0 / p))


def default_boundary_rule(f: BoundaryDatum) -> QuadratureRule:
    if f.domain == "sphere":
        return sphere_rule(f.m, 30)
    return hyperplane_rule(f.m, 32, 24, scale=f.scale, center=f.center_array())


def lp_norm(f: BoundaryDatum, p: float, rule: QuadratureRule | None = None, convention: str = "sphere",
            degree: int | None = None, tail_tol: float = 1e-6) -> float:
    """||f||_p over boundary x S^{m-1} (``convention="ball"``: boundary x B^m)."""
    if p < 1:
        raise DomainError(f"L^p norms need p >= 1, got {p}")
    rule = rule if rule is not None else default_boundary_rule(f)
    C = f.coeffs(rule.nodes)
    if f.domain == "hyperplane" and math.isfinite(p):
        inner = fiber_lp(f.basis, C, p, convention, degree)
        contrib = rule.weights * inner
        total = float(np.sum(contrib))
        r = np.linalg.norm(rule.nodes - f.center_array(), axis=1)
        tail = float(np.sum(contrib[r >= 0.5 * r.max()]))
        if total > 0 and tail > tail_tol * total:
            raise QuadratureError(f"L^{p:g} norm of {f.label!r} has tail mass {tail / total:.2e} of the total "
                                  f"beyond radius {0.5 * r.max():.3g}; the datum may not be in L^{p:g}")
    return lp_norm_from_coefficients(f.basis, C, rule.weights, p, convention, degree)


def ball_sphere_factor(basis: HarmonicBasis, p: float) -> float:
    """Measured ratio ||f||_ball^p / ||f||_sphere^p for a fixed H_k element (exact value 1/(m+kp))."""
    c = np.ones((1, basis.dim)) / math.sqrt(basis.dim)
    return float(fiber_lp(basis, c, p, "ball")[0] / fiber_lp(basis, c, p, "sphere")[0])


# ---------------------------------------------------------------------------
# convergence reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    parameter: float
    error: float


def boundary_convergence_report(h: BoundaryDatum, p: float, radii: Sequence[float],
                                settings: RuleSettings = RuleSettings(), outer_degree: int = 24) -> list[ConvergenceRow]:
    """Rows (r, ||h*_r - h||_p) with h*_r(eta, nu) = P_B[h](r eta, nu)."""
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly increasing")
    if radii and (radii[0] < 0 or radii[-1] >= 1):
        raise DomainError("radii must lie in [0, 1)")
    outer = sphere_rule(h.m, outer_degree)
    G = h.coeffs(outer.nodes)
    rows = []
    for r in radii:
        if r == 0.0:
            c0 = poisson_coefficients_ball(h, np.zeros(h.m), settings)
            Cr = np.tile(c0, (outer.size, 1))
        else:
            Cr = np.array([poisson_coefficients_ball(h, r * z, settings) for z in outer.nodes])
        rows.append(ConvergenceRow(r, lp_norm_from_coefficients(h.basis, Cr - G, outer.weights, p)))
    return rows


def halfspace_convergence_report(f: BoundaryDatum, p: float, heights: Sequence[float],
                                 settings: RuleSettings = RuleSettings(),
                                 outer: QuadratureRule | None = None) -> list[ConvergenceRow]:
    """Rows (y, ||g_y - f||_p) with g_y(x', nu) = P_H[f]((x', y), nu)."""
    if any(y <= 0 for y in heights):
        raise DomainError("heights must be positive")
    outer = outer if outer is not None else hyperplane_rule(f.m, 24, 20, scale=f.scale, center=f.center_array())
    F = f.coeffs(outer.nodes)
    rows = []
    for y in heights:
        G = np.array([poisson_coefficients_half(f, np.append(t, y), settings) for t in outer.nodes])
        rows.append(ConvergenceRow(float(y), lp_norm_from_coefficients(f.basis, G - F, outer.weights, p)))
    return rows


def ball_lp_bound_ratio(h: BoundaryDatum, p: float, r: float, settings: RuleSettings = RuleSettings(),
                        outer_degree: int = 24) -> float:
    """||h*_r||_p / ||h||_p, the measured constant in the ball L^p bound."""
    outer = sphere_rule(h.m, outer_degree)
    G = h.coeffs(outer.nodes)
    if r == 0:
        Cr = np.tile(poisson_coefficients_ball(h, np.zeros(h.m), settings), (outer.size, 1))
    else:
        Cr = np.array([poisson_coefficients_ball(h, r * z, settings) for z in outer.nodes])
    num = lp_norm_from_coefficients(h.basis, Cr, outer.weights, p)
    return num / lp_norm_from_coefficients(h.basis, G, outer.weights, p)


# ---------------------------------------------------------------------------
# mean-value properties
# ---------------------------------------------------------------------------


def _check_ball_inside(F: FieldHk, a, r: float, guard: float = 0.0):
    a = np.asarray(a, dtype=float)
    if r <= 0:
        raise DomainError("radius must be positive")
    if F.margin(a) < r + guard:
        raise GuardError(f"ball B({a.tolist()}, {r:g}) is not inside the field's {F.domain} domain with margin {guard:g}")
    return a


def mean_value_check(F: FieldHk, a, r: float, nu, rule: QuadratureRule | None = None,
                     allow_k0: bool = False) -> float:
    """|F(a, nu) - (c_{m,k}/2) int F(a + r zeta, zeta nu zeta) dS(zeta)|."""
    a = _check_ball_inside(F, a, r)
    nu = np.asarray(nu, dtype=float)
    if F.k == 0 and not allow_k0:
        raise DomainError("k = 0 requires allow_k0")
    rule = rule if rule is not None else sphere_rule(F.m, 24)
    c = KernelConstants(F.m, F.k).c_mk
    rhs = 0.5 * c * integrate(rule, lambda z: F(a + r * z, reflect(z, nu)))
    return abs(float(F(a, nu)) - rhs)


def volume_mean_value_check(F: FieldHk, a, r: float, nu, rule: QuadratureRule | None = None,
                            allow_k0: bool = False) -> float:
    """|F(a, nu) - (m+2k-2)/((m-2) V) int_{B(a,r)} F(x, eta nu eta) dx|, eta = (x-a)/|x-a|."""
    a = _check_ball_inside(F, a, r)
    nu = np.asarray(nu, dtype=float)
    m, k = F.m, F.k
    if k == 0 and not allow_k0:
        raise DomainError("k = 0 requires allow_k0")
    rule = rule if rule is not None else ball_rule(m, 24)
    # ball_rule nodes never sit at the centre (radial Gauss-Jacobi nodes are interior)
    r_nodes = np.linalg.norm(rule.nodes, axis=1)
    if np.any(r_nodes == 0):
        raise QuadratureError("ball rule has a node at the centre")
    V = omega(m) / m * r**m
    pref = (m + 2 * k - 2) / ((m - 2) * V)

    def integrand(pts):
        eta = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        return F(a + r * pts, reflect(eta, nu))

    rhs = pref * r**m * integrate(rule, integrand)
    return abs(float(F(a, nu)) - rhs)


def sphere_average(F: FieldHk, a, r: float, nu, rule: QuadratureRule | None = None) -> float:
    """(c_{m,k}/2) int F(a + r zeta, zeta nu zeta) dS(zeta)."""
    rule = rule if rule is not None else sphere_rule(F.m, 24)
    a = np.asarray(a, dtype=float)
    nu = np.asarray(nu, dtype=float)
    c = KernelConstants(F.m, F.k).c_mk
    return 0.5 * c * integrate(rule, lambda z: F(a + r * z, reflect(z, nu)))


# ---------------------------------------------------------------------------
# conformal transfer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConformalReport:
    max_deviation: float
    rows: list
    jacobian_fd_error: float
    change_of_variables_error: float


def conformal_transfer_check(f: BoundaryDatum, samples, nus=None, settings: RuleSettings = RuleSettings(),
                             ball_settings: RuleSettings | None = None, convention: str = "reflected",
                             jacobian_points=None) -> ConformalReport:
    """Compare P_B[h](x, nu) with |x - e_m|^{2-m} P_H[f](psi(x), R nu) at sample points.

    h is the Cayley pull-back of f (:func:`cayley_pullback`), psi the
    reflected Cayley map and R the orthogonal map at x from
    :func:`~bosonic_bvp.clifford.cayley_rotation`.
    """
    from .clifford import cayley_jacobian_fd

    if convention != "reflected":
        raise DomainError("identities are verified under the reflected Cayley convention")
    m = f.m
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    rng = np.random.default_rng(7)
    if nus is None:
        nus = rng.standard_normal((samples.shape[0], m))
        nus /= np.linalg.norm(nus, axis=1, keepdims=True)
    nus = np.atleast_2d(nus)
    h = cayley_pullback(f, convention)
    ball_settings = ball_settings or settings
    rows = []
    for x, nu in zip(samples, nus):
        z = cayley(x, convention)
        R = cayley_rotation(x, convention)
        w = x.copy()
        w[-1] -= 1.0
        weight = float(np.dot(w, w)) ** ((2 - m) / 2)
        lhs = poisson_integral_ball(h, x, nu, ball_settings)
        rhs = weight * poisson_integral_half(f, z, R @ nu, settings)
        rows.append((x.tolist(), nu.tolist(), lhs, rhs, abs(lhs - rhs)))
    dev = max((r[-1] for r in rows), default=0.0)
    if jacobian_points is None:
        jacobian_points = rng.standard_normal((5, m))
        jacobian_points /= np.linalg.norm(jacobian_points, axis=1, keepdims=True)
    jac_err = max(abs(cayley_jacobian_fd(z, convention) - float(cayley_jacobian(z))) for z in jacobian_points)
    cov_err = change_of_variables_error(m)
    return ConformalReport(dev, rows, jac_err, cov_err)


def change_of_variables_error(m: int, degree: int = 80) -> float:
    """|int_{S} G(psi(zeta)) J(zeta) dS - int_{R^{m-1}} G(t') dt'| for G(t') = exp(-|t'-c|^2)."""
    c = np.full(m - 1, 0.3)

    def G(t):
        return np.exp(-np.sum((t - c) ** 2, axis=1))

    rule = focused_sphere_rule(m, np.eye(m)[-1] * -1.0, 0.25, 24, degree)
    lhs = integrate(rule, lambda z: G(cayley(z, "reflected")[:, :-1]) * cayley_jacobian(z))
    exact = math.pi ** ((m - 1) / 2)
    return abs(lhs - exact)


# ---------------------------------------------------------------------------
# Cauchy-estimate probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CauchyRow:
    radius: float
    gradient_norm: float
    sup_norm: float
    ratio: float


def gradient_at(F: FieldHk, a, nu, h: float = 1e-4) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    m = F.m
    offs = np.concatenate([np.eye(m) * h, -np.eye(m) * h])
    g = F.coeffs(a[None, :] + offs)
    dg = (g[:m] - g[m:]) / (2 * h)  # (m, t)
    return dg @ F.basis.evaluate(np.asarray(nu, dtype=float))


def sampled_sup(F: FieldHk, a, r: float, x_degree: int = 4, nu_degree: int | None = None) -> float:
    """max |F(x, nu)| over x in {a} and two sphere-rule shells (radii r/2, r), nu on a sphere rule."""
    a = np.asarray(a, dtype=float)
    shell = sphere_rule(F.m, x_degree).nodes
    X = np.concatenate([a[None, :], a + 0.5 * r * shell, a + r * shell])
    nu_rule = sphere_rule(F.m, nu_degree if nu_degree is not None else 2 * F.k + 4)
    C = F.coeffs(X)
    return float(np.max(np.abs(C @ F.basis.evaluate(nu_rule.nodes).T)))


def cauchy_estimate_probe(F: FieldHk, a, nu, radii: Sequence[float], x_degree: int = 4) -> list[CauchyRow]:
    """Rows (r, |grad_x F(a, nu)|, sup_{B(a,r) x B}|F|, |grad| r / sup)."""
    a = np.asarray(a, dtype=float)
    grad = float(np.linalg.norm(gradient_at(F, a, nu)))
    rows = []
    for r in radii:
        _check_ball_inside(F, a, r, guard=0.0)
        sup = sampled_sup(F, a, r, x_degree)
        rows.append(CauchyRow(float(r), grad, sup, grad * r / sup if sup > 0 else 0.0))
    return rows


def cauchy_constant(m: int, k: int, zeta_degree: int | None = None, w_degree: int | None = None,
                    n_angles: int = 7, h: float = 1e-5) -> float:
    """sup_nu int int |d/dx_1 P_B(0, zeta, w, nu)| dS(w) dS(zeta), the first-order Cauchy constant.

    For a null solution continuous on the closed ball B(a, r),
    |grad_x F(a, nu)| <= C sup|F| / r with this C (rotation invariance of
    P_B lets a single direction stand for all).  The double integral is
    invariant under rotations fixing e_1 and under nu -> -nu, so the sup runs
    over nu = cos(theta) e_1 + sin(theta) e_2, theta in [0, pi/2].
    """
    # the |.| makes the integrand only piecewise smooth; these degrees agree with
    # much finer rules to a few parts in 1e3
    Z = sphere_rule(m, zeta_degree if zeta_degree is not None else (16 if m < 5 else 10))
    W = sphere_rule(m, w_degree if w_degree is not None else (10 if m < 5 else 6))
    e = np.zeros(m)
    e[0] = h
    best = 0.0
    for theta in np.linspace(0.0, 0.5 * np.pi, n_angles):
        nu = np.zeros(m)
        nu[0], nu[1] = np.cos(theta), np.sin(theta)

        def integrand(z):
            zz = z[:, None, :]
            ww = W.nodes[None, :, :]
            dP = (poisson_ball(e, zz, ww, nu, k) - poisson_ball(-e, zz, ww, nu, k)) / (2 * h)
            return np.abs(dP) @ W.weights

        best = max(best, integrate(Z, integrand))
    return best


# ---------------------------------------------------------------------------
# half-space tail mass
# ---------------------------------------------------------------------------


def tail_mass(m: int, k: int, a, y: float, delta: float, v, settings: RuleSettings = RuleSettings(),
              u_degree: int | None = None) -> tuple[float, float]:
    """(signed, absolute) integrals of P_H((a, y), t, u, v) over |t' - a| > delta and u in S^{m-1}."""
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    x = np.append(a, y)
    br = graded_breakpoints(delta, max(4 * delta, 4 * y), settings.ratio)
    rule = hyperplane_rule(m, settings.radial_order, 2 * k + 2, scale=max(y, delta), center=a,
                           breakpoints=[delta] + [b for b in br if b > delta])
    r = np.linalg.norm(rule.nodes - a, axis=1)
    keep = r > delta
    rule = QuadratureRule("hyperplane", m, rule.nodes[keep], rule.weights[keep], None, rule.params)
    U = sphere_rule(m, u_degree if u_degree is not None else 2 * k + 8)
    c = KernelConstants(m, k).c_mk
    from .zonal import zonal_eval

    def both(tp):
        d = np.concatenate([x[:-1] - tp, np.full((tp.shape[0], 1), y)], axis=1)
        dist2 = np.sum(d * d, axis=1)
        K = c * y / dist2 ** (m / 2)
        Ru = reflect(d[:, None, :], U.nodes[None, :, :])
        Z = zonal_eval(m, k, Ru, v)
        return np.stack([K * (Z @ U.weights), K * (np.abs(Z) @ U.weights)], axis=1)

    s, ab = integrate(rule, both)
    return float(s), float(ab)


def fd_residual_ratios(F: FieldHk, points, nus, h: float) -> list[tuple]:
    """Per point: (|D_k F|(h), |D_k F|(h/2), ratio)."""
    out = []
    for x, nu in zip(points, nus):
        r1 = apply_Dk_fd(F, x, nu, h)
        r2 = apply_Dk_fd(F, x, nu, h / 2)
        out.append((r1.norm, r2.norm, r1.norm / r2.norm if r2.norm > 0 else float("inf")))
    return out
