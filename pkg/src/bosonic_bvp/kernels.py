"""Poisson kernels of D_k on the upper half-space and the unit ball.

Both kernels are evaluated with the reflection aua/|a|^2 written out as
u - 2<u,a>a/|a|^2 and with Z_k in its Gegenbauer closed form, so every
argument may carry leading batch axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import cayley_rotation, reflect
from .errors import DimensionMismatch, DomainError, GuardError
from .harmonic import harmonic_dimension, omega
from .zonal import zonal_constant, zonal_eval

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class KernelConstants:
    m: int
    k: int

    def __post_init__(self):
        if self.m < 3:
            raise DomainError(f"kernels need m >= 3, got m={self.m}")
        if self.k < 0:
            raise DomainError(f"k must be non-negative, got {self.k}")

    @property
    def omega_m(self) -> float:
        return omega(self.m)

    @property
    def c_mk(self) -> float:
        """2(m+2k-2)/((m-2) omega_m)."""
        return 2.0 * (self.m + 2 * self.k - 2) / ((self.m - 2) * self.omega_m)

    @property
    def z_mk(self) -> float:
        return zonal_constant(self.m, self.k)

    @property
    def dim(self) -> int:
        return harmonic_dimension(self.m, self.k)

    def as_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "omega_m": self.omega_m, "c_mk": self.c_mk,
                "z_mk": self.z_mk, "dim_Hk": self.dim}


def c_mk(m: int, k: int) -> float:
    return KernelConstants(m, k).c_mk


@dataclass(frozen=True)
class PointHalfSpace:
    """x = (x', y) with y > 0."""

    x_prime: tuple
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError(f"half-space point needs y > 0, got y={self.y}")

    @classmethod
    def from_vector(cls, x) -> "PointHalfSpace":
        x = np.asarray(x, dtype=float)
        return cls(tuple(x[:-1].tolist()), float(x[-1]))

    def vector(self) -> np.ndarray:
        return np.array(list(self.x_prime) + [self.y])

    @property
    def m(self) -> int:
        return len(self.x_prime) + 1


def _as_point(x) -> np.ndarray:
    if isinstance(x, PointHalfSpace):
        return x.vector()
    return np.asarray(x, dtype=float)


def _offset(x: np.ndarray, t_prime: np.ndarray) -> np.ndarray:
    """x - (t', 0), broadcasting the batch axes of x and t'."""
    dp = x[..., :-1] - t_prime
    y = np.broadcast_to(x[..., -1:], dp.shape[:-1] + (1,))
    return np.concatenate([dp, y], axis=-1)


def poisson_half(x, t_prime, u, v, k: int) -> np.ndarray:
    """P_H(x, t', u, v) = c_{m,k} y/|x-t|^m Z_k(R_{x-t} u, v), t = (t', 0)."""
    x = _as_point(x)
    m = x.shape[-1]
    t_prime = np.asarray(t_prime, dtype=float)
    if t_prime.shape[-1] != m - 1:
        raise DimensionMismatch(f"boundary point needs {m - 1} coordinates, got {t_prime.shape[-1]}")
    y = x[..., -1]
    if np.any(y <= 0):
        raise DomainError("half-space kernel needs y > 0")
    d = _offset(x, t_prime)
    dist = np.sqrt(np.sum(d * d, axis=-1))
    if np.any(dist < SINGULAR_TOL):
        raise GuardError("half-space kernel evaluated at its singular point")
    z = zonal_eval(m, k, reflect(d, u), v)
    return KernelConstants(m, k).c_mk * y / dist**m * z


def poisson_ball(x, zeta, w, nu, k: int) -> np.ndarray:
    """P_B(x, zeta, w, nu) = (c_{m,k}/2)(1-|x|^2)/|x-zeta|^m Z_k(R_{x-zeta} w, nu)."""
    x = np.asarray(x, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    m = x.shape[-1]
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 >= 1.0):
        raise DomainError("ball kernel needs |x| < 1")
    if np.any(1.0 - np.sqrt(r2) < SINGULAR_TOL):
        raise GuardError("ball kernel evaluated within the boundary guard")
    d = x - zeta
    dist = np.sqrt(np.sum(d * d, axis=-1))
    if np.any(dist < SINGULAR_TOL):
        raise GuardError("ball kernel evaluated at its singular point")
    z = zonal_eval(m, k, reflect(d, w), nu)
    return 0.5 * KernelConstants(m, k).c_mk * (1.0 - r2) / dist**m * z


def kernel_rotation_pair(x, zeta, convention: str = "literal"):
    """Orthogonal maps u -> omega at zeta and v -> nu at x induced by the Cayley transform.

    Returns (omega_map, nu_map) as m x m matrices.  With ``"literal"`` they are
    u -> rev(e_m zeta + 1) u (e_m zeta + 1)/|e_m zeta + 1|^2 (and the same at x);
    with ``"reflected"`` the Cayley denominator is zeta - e_m.
    """
    return cayley_rotation(zeta, convention), cayley_rotation(x, convention)


def kernel_coefficients_half(x, t_prime, u, basis) -> np.ndarray:
    """H_k coefficients in v of P_H(x, t', u, .): c y/|x-t|^m phi_j(R_{x-t} u)."""
    x = _as_point(x)
    m = x.shape[-1]
    t_prime = np.asarray(t_prime, dtype=float)
    y = x[..., -1]
    if np.any(y <= 0):
        raise DomainError("half-space kernel needs y > 0")
    d = _offset(x, t_prime)
    dist = np.sqrt(np.sum(d * d, axis=-1))
    if np.any(dist < SINGULAR_TOL):
        raise GuardError("half-space kernel evaluated at its singular point")
    scale = KernelConstants(m, basis.k).c_mk * y / dist**m
    return scale[..., None] * basis.evaluate(reflect(d, u))


def ball_poisson_classical(x, zeta) -> np.ndarray:
    """(1-|x|^2)/|x-zeta|^m, the scalar factor shared with the harmonic Poisson kernel."""
    x = np.asarray(x, dtype=float)
    d = x - np.asarray(zeta, dtype=float)
    m = x.shape[-1]
    return (1.0 - np.sum(x * x, axis=-1)) / np.sum(d * d, axis=-1) ** (m / 2)


def half_tail_mass_exact(m: int, k: int, y: float, delta: float) -> float:
    """c_{m,k} int_{|t'|>delta} y/|x-t|^m dt' for x = (0, y), in closed form.

    Equals c_{m,k} omega_{m-1} int_delta^inf y r^{m-2}/(r^2+y^2)^{m/2} dr, with
    the radial integral evaluated through the regularised incomplete Beta
    function: substituting s = r^2/(r^2+y^2) gives (1/2) B(1/2, (m-1)/2) (1 - I_{s0}((m-1)/2, 1/2)).
    """
    from scipy.special import beta, betainc

    a, b = (m - 1) / 2.0, 0.5
    s0 = delta**2 / (delta**2 + y**2)
    radial = 0.5 * beta(a, b) * (1.0 - betainc(a, b, s0))
    return c_mk(m, k) * omega(m - 1) * radial

