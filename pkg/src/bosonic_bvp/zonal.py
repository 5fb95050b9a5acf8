"""Reproducing kernel Z_k of H_k with respect to surface measure on S^{m-1}.

Production evaluation uses the Gegenbauer closed form
Z_k(u, v) = z_{m,k} |u|^k |v|^k C_k^{(m-2)/2}(<u^, v^>), computed through the
homogeneous form of the three-term recurrence so that zero vectors need no
special casing.  :func:`zonal_oracle` sums phi_j(u) phi_j(v) over an
orthonormal basis and is kept as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError
from .harmonic import HarmonicBasis, harmonic_dimension, omega


def gegenbauer(n: int, lam: float, t):
    """C_n^lam(t) by the three-term recurrence; vectorised over ``t``."""
    if n < 0:
        raise DomainError("Gegenbauer degree must be non-negative")
    if lam <= 0:
        raise DomainError("Gegenbauer parameter must be positive")
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * lam * t
    for j in range(2, n + 1):
        prev, cur = cur, (2.0 * (j + lam - 1) * t * cur - (j + 2 * lam - 2) * prev) / j
    return cur if cur.ndim else float(cur)


def zonal_constant(m: int, k: int) -> float:
    """z_{m,k} = (2k+m-2)/((m-2) omega_m)."""
    if m < 3:
        raise DomainError(f"zonal kernels need m >= 3, got {m}")
    return (2 * k + m - 2) / ((m - 2) * omega(m))


def _homogeneous_gegenbauer(k: int, lam: float, s, q):
    # H_n = |u|^n |v|^n C_n(<u^,v^>) with s = <u,v>, q = |u|^2 |v|^2
    prev = np.ones_like(s)
    if k == 0:
        return prev
    cur = 2.0 * lam * s
    for j in range(2, k + 1):
        prev, cur = cur, (2.0 * (j + lam - 1) * s * cur - (j + 2 * lam - 2) * q * prev) / j
    return cur


def zonal_eval(m: int, k: int, u, v):
    """Z_k(u, v), broadcasting over leading axes of ``u`` and ``v`` (last axis length m)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != m or v.shape[-1] != m:
        raise DimensionMismatch(f"zonal kernel in m={m} given vectors of length {u.shape[-1]}, {v.shape[-1]}")
    s = np.sum(u * v, axis=-1)
    q = np.sum(u * u, axis=-1) * np.sum(v * v, axis=-1)
    out = zonal_constant(m, k) * _homogeneous_gegenbauer(k, (m - 2) / 2.0, s, q)
    return out if np.ndim(out) else float(out)


def zonal_grad_v(m: int, k: int, u, v):
    """Gradient of Z_k(u, v) in v, by differentiating the homogeneous recurrence."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    lam = (m - 2) / 2.0
    s = np.sum(u * v, axis=-1)
    uu = np.sum(u * u, axis=-1)
    q = uu * np.sum(v * v, axis=-1)
    # dH_n = a_n u + b_n v
    prev, cur = np.ones_like(s), 2.0 * lam * s
    pa, pb = np.zeros_like(s), np.zeros_like(s)
    ca, cb = 2.0 * lam * np.ones_like(s), np.zeros_like(s)
    if k == 0:
        return np.zeros(np.broadcast_shapes(u.shape, v.shape))
    for j in range(2, k + 1):
        c1, c2 = 2.0 * (j + lam - 1) / j, (j + 2 * lam - 2) / j
        na = c1 * (cur + s * ca) - c2 * q * pa
        nb = c1 * s * cb - c2 * (q * pb + 2.0 * uu * prev)
        prev, cur = cur, c1 * s * cur - c2 * q * prev
        pa, pb, ca, cb = ca, cb, na, nb
    return zonal_constant(m, k) * (ca[..., None] * u + cb[..., None] * v)


def zonal_oracle(basis: HarmonicBasis, u, v):
    """sum_j phi_j(u) phi_j(v), extended bihomogeneously by construction."""
    return np.sum(basis.evaluate(u) * basis.evaluate(v), axis=-1)


def zonal_bound(m: int, k: int) -> float:
    """sup |Z_k(u,v)| over unit u, v, attained at u = v: dim H_k / omega_m."""
    return harmonic_dimension(m, k) / omega(m)


@dataclass(frozen=True)
class ZonalKernel:
    m: int
    k: int

    def __post_init__(self):
        if self.m < 3 or self.k < 0:
            raise DomainError(f"unsupported zonal kernel m={self.m}, k={self.k}")

    @property
    def normalization(self) -> float:
        return zonal_constant(self.m, self.k)

    def __call__(self, u, v):
        return zonal_eval(self.m, self.k, u, v)

    def grad_v(self, u, v):
        return zonal_grad_v(self.m, self.k, u, v)

    @property
    def bound(self) -> float:
        return zonal_bound(self.m, self.k)
