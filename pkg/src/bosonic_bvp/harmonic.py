"""Exact polynomials in (x, u) and orthonormal bases of the harmonic space H_k.

A :class:`MultiPoly` stores a dict from a length-2m exponent tuple
(x-exponents first, then u-exponents) to a coefficient.  Coefficients may be
``int``, ``fractions.Fraction`` or ``float``; arithmetic keeps whatever type
the inputs carry, so rational inputs stay exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Number
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy

from .budget import check_budget
from .errors import DimensionMismatch, DomainError, NotInHkError


class MultiPoly:
    """Polynomial in x_1..x_m, u_1..u_m with canonical (zero-free) coefficient storage."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Mapping[tuple, Number] | None = None):
        if m < 1:
            raise DomainError("dimension must be positive")
        self.m = m
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != 2 * m:
                raise DimensionMismatch(f"exponent tuple of length {len(exps)} for m={m}")
            if any(e < 0 for e in exps):
                raise DomainError("negative exponent")
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
                if clean[exps] == 0:
                    del clean[exps]
        self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, m: int, c: Number = 1) -> "MultiPoly":
        return cls(m, {(0,) * (2 * m): c})

    @classmethod
    def monomial(cls, m: int, x_exp: Sequence[int] = (), u_exp: Sequence[int] = (), c: Number = 1) -> "MultiPoly":
        xe = list(x_exp) + [0] * (m - len(x_exp))
        ue = list(u_exp) + [0] * (m - len(u_exp))
        return cls(m, {tuple(xe + ue): c})

    @classmethod
    def x(cls, m: int, j: int) -> "MultiPoly":
        """The coordinate x_j (1-based)."""
        e = [0] * (2 * m)
        e[j - 1] = 1
        return cls(m, {tuple(e): 1})

    @classmethod
    def u(cls, m: int, j: int) -> "MultiPoly":
        """The coordinate u_j (1-based)."""
        e = [0] * (2 * m)
        e[m + j - 1] = 1
        return cls(m, {tuple(e): 1})

    @classmethod
    def u_norm_sq(cls, m: int) -> "MultiPoly":
        return sum((cls.u(m, j) * cls.u(m, j) for j in range(1, m + 1)), cls(m))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if not isinstance(other, MultiPoly):
            raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")
        if other.m != self.m:
            raise DimensionMismatch(f"polynomials in dimensions {self.m} and {other.m}")

    def __add__(self, other):
        if isinstance(other, Number):
            other = MultiPoly.constant(self.m, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return MultiPoly(self.m, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.m, out)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"MultiPoly(m={self.m}, 0)"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            factors = [f"x{j + 1}^{p}" if p > 1 else f"x{j + 1}" for j, p in enumerate(e[: self.m]) if p]
            factors += [f"u{j + 1}^{p}" if p > 1 else f"u{j + 1}" for j, p in enumerate(e[self.m:]) if p]
            parts.append(f"{c}" + ("*" + "*".join(factors) if factors else ""))
        return f"MultiPoly(m={self.m}, {' + '.join(parts)})"

    # -- calculus ---------------------------------------------------------
    def _partial(self, slot: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            p = e[slot]
            if p:
                ne = list(e)
                ne[slot] = p - 1
                out[tuple(ne)] = c * p
        return MultiPoly(self.m, out)

    def partial_x(self, j: int) -> "MultiPoly":
        if not 1 <= j <= self.m:
            raise DomainError(f"x-index {j} outside 1..{self.m}")
        return self._partial(j - 1)

    def partial_u(self, j: int) -> "MultiPoly":
        if not 1 <= j <= self.m:
            raise DomainError(f"u-index {j} outside 1..{self.m}")
        return self._partial(self.m + j - 1)

    def laplacian_x(self) -> "MultiPoly":
        return sum((self.partial_x(j).partial_x(j) for j in range(1, self.m + 1)), MultiPoly(self.m))

    def laplacian_u(self) -> "MultiPoly":
        return sum((self.partial_u(j).partial_u(j) for j in range(1, self.m + 1)), MultiPoly(self.m))

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def x_degree(self) -> int:
        """Largest total x-degree among stored terms (-1 for the zero polynomial)."""
        return max((sum(e[: self.m]) for e in self.terms), default=-1)

    def u_degree(self) -> int:
        return max((sum(e[self.m:]) for e in self.terms), default=-1)

    def is_u_homogeneous(self, k: int) -> bool:
        return all(sum(e[self.m:]) == k for e in self.terms)

    def depends_on_x(self) -> bool:
        return any(any(e[: self.m]) for e in self.terms)

    def max_abs_coefficient(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def evaluate(self, x: Sequence[float] | None = None, u: Sequence[float] | None = None):
        """Value at (x, u).  With all-rational inputs the result is exact."""
        x = [0] * self.m if x is None else list(x)
        u = [0] * self.m if u is None else list(u)
        if len(x) != self.m or len(u) != self.m:
            raise DimensionMismatch("evaluation point has wrong length")
        pt = x + u
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, p in zip(pt, e):
                if p:
                    term = term * v**p
            total = total + term
        return total

    def evaluate_many(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Float evaluation at arrays of points, shapes (N, m) and (N, m)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if not self.terms:
            return np.zeros(max(x.shape[0], u.shape[0]))
        E = np.array(list(self.terms.keys()))
        c = np.array([float(v) for v in self.terms.values()])
        pts = np.concatenate(np.broadcast_arrays(x, u), axis=1)
        return _monomials(pts, E) @ c

    def u_part_only(self) -> "MultiPoly":
        if self.depends_on_x():
            raise DomainError("polynomial depends on x")
        return self


def _monomials(points: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Matrix of prod_i points[n,i]**E[a,i], shape (N, len(E))."""
    out = np.ones((points.shape[0], E.shape[0]))
    if E.size == 0 or E.max() == 0:
        return out
    # powers by repeated multiplication, then gather per exponent column
    pw = [np.ones_like(points), points]
    for _ in range(2, int(E.max()) + 1):
        pw.append(pw[-1] * points)
    P = np.stack(pw, axis=-1)  # (N, dims, maxdeg+1)
    for i in range(E.shape[1]):
        col = E[:, i]
        if np.any(col):
            out *= P[:, i, col]
    return out


# ---------------------------------------------------------------------------
# sphere moments
# ---------------------------------------------------------------------------


def omega(m: int) -> float:
    """Surface area of S^{m-1}."""
    return 2.0 * math.pi ** (m / 2) / math.gamma(m / 2)


def sphere_moment(alpha: Sequence[int]) -> float:
    """Integral of prod u_i^alpha_i over S^{m-1} against surface measure, m = len(alpha)."""
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise DomainError("moment exponents must be non-negative")
    return _sphere_moment(alpha)


@lru_cache(maxsize=None)
def _sphere_moment(alpha: tuple) -> float:
    if any(a % 2 for a in alpha):
        return 0.0
    m = len(alpha)
    log_val = sum(math.lgamma((a + 1) / 2) for a in alpha) - math.lgamma((sum(alpha) + m) / 2)
    return 2.0 * math.exp(log_val)


def homogeneous_exponents(m: int, k: int) -> list[tuple]:
    """All exponent tuples of total degree k in m variables, in a fixed (reverse-lex) order."""
    if k < 0:
        return []
    out = []
    for combo in itertools.combinations_with_replacement(range(m), k):
        e = [0] * m
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def harmonic_dimension(m: int, k: int) -> int:
    if k < 0:
        return 0
    low = math.comb(m + k - 3, m - 1) if k >= 2 else 0
    return math.comb(m + k - 1, m - 1) - low


def moment_gram(exponents: Sequence[tuple]) -> np.ndarray:
    n = len(exponents)
    G = np.empty((n, n))
    for a in range(n):
        for b in range(a, n):
            G[a, b] = G[b, a] = sphere_moment(tuple(p + q for p, q in zip(exponents[a], exponents[b])))
    return G


# ---------------------------------------------------------------------------
# harmonic basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """Orthonormal basis of H_k over S^{m-1} with unnormalised surface measure.

    ``coeffs[a, j]`` is the coefficient of monomial ``monomials[a]`` in phi_j;
    ``kernel`` holds the exact rational null-space vectors of Delta_u before
    orthonormalisation.
    """

    m: int
    k: int
    monomials: tuple
    coeffs: np.ndarray
    gram: np.ndarray
    kernel: tuple

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def exponent_array(self) -> np.ndarray:
        return np.array(self.monomials, dtype=int).reshape(len(self.monomials), self.m)

    def element(self, j: int) -> MultiPoly:
        """phi_{j+1} as a u-only :class:`MultiPoly` with float coefficients (0-based j)."""
        terms = {(0,) * self.m + e: float(c) for e, c in zip(self.monomials, self.coeffs[:, j])}
        return MultiPoly(self.m, terms)

    def elements(self) -> list[MultiPoly]:
        return [self.element(j) for j in range(self.dim)]

    def exact_kernel_element(self, j: int) -> MultiPoly:
        """The j-th rational null-space vector of Delta_u (not normalised)."""
        terms = {(0,) * self.m + e: c for e, c in zip(self.monomials, self.kernel[j])}
        return MultiPoly(self.m, terms)

    def evaluate(self, u: np.ndarray) -> np.ndarray:
        """phi_j(u) for points u of shape (..., m); returns (..., t)."""
        u = np.asarray(u, dtype=float)
        flat = u.reshape(-1, self.m)
        vals = _monomials(flat, self.exponent_array) @ self.coeffs
        return vals.reshape(u.shape[:-1] + (self.dim,))

    def _derivative_table(self, alpha: tuple):
        E = self.exponent_array
        factor = np.ones(E.shape[0])
        D = E.copy()
        for i, a in enumerate(alpha):
            for _ in range(a):
                factor = factor * D[:, i]
                D[:, i] = np.maximum(D[:, i] - 1, 0)
        return D, factor

    def derivative(self, u: np.ndarray, alpha: Sequence[int]) -> np.ndarray:
        """Partial derivative d^alpha phi_j / du^alpha at u, shape (..., t)."""
        u = np.asarray(u, dtype=float)
        flat = u.reshape(-1, self.m)
        D, factor = self._derivative_table(tuple(alpha))
        vals = (_monomials(flat, D) * factor[None, :]) @ self.coeffs
        return vals.reshape(u.shape[:-1] + (self.dim,))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        """Shape (..., m, t): d phi_j / du_i."""
        rows = []
        for i in range(self.m):
            a = [0] * self.m
            a[i] = 1
            rows.append(self.derivative(u, a))
        return np.stack(rows, axis=-2)

    def hessian(self, u: np.ndarray) -> np.ndarray:
        """Shape (..., m, m, t): d^2 phi_j / du_i du_l."""
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape[:-1] + (self.m, self.m, self.dim))
        for i in range(self.m):
            for l in range(i, self.m):
                a = [0] * self.m
                a[i] += 1
                a[l] += 1
                out[..., i, l, :] = out[..., l, i, :] = self.derivative(u, a)
        return out

    def combine(self, coefficients: np.ndarray, u: np.ndarray) -> np.ndarray:
        """sum_j c_j phi_j(u) with c of shape (..., t) broadcast against u of shape (..., m)."""
        return np.sum(np.asarray(coefficients) * self.evaluate(u), axis=-1)


def harmonic_basis(m: int, k: int) -> HarmonicBasis:
    """Orthonormal basis of H_k in m variables (cached)."""
    if m < 3:
        raise DomainError(f"harmonic bases require m >= 3, got {m}")
    if k < 0:
        raise DomainError(f"degree must be non-negative, got {k}")
    check_budget(math.comb(m + k - 1, m - 1) ** 2, f"harmonic basis m={m}, k={k}")
    return _harmonic_basis(m, k)


@lru_cache(maxsize=None)
def _harmonic_basis(m: int, k: int) -> HarmonicBasis:
    src = homogeneous_exponents(m, k)
    kernel = _laplacian_kernel(m, k, src)
    N = np.array([[float(c) for c in vec] for vec in kernel]).T  # (M, t)
    G = moment_gram(src)
    gram_kernel = N.T @ G @ N
    L = np.linalg.cholesky(gram_kernel)
    coeffs = np.linalg.solve(L, N.T).T
    gram = coeffs.T @ G @ coeffs
    return HarmonicBasis(m, k, tuple(src), coeffs, gram, tuple(tuple(v) for v in kernel))


def _laplacian_kernel(m: int, k: int, src: list) -> list:
    """Rational null-space basis of Delta_u restricted to degree-k homogeneous polynomials."""
    if k < 2:
        return [[Fraction(int(a == b)) for b in range(len(src))] for a in range(len(src))]
    dst = {e: i for i, e in enumerate(homogeneous_exponents(m, k - 2))}
    A = sympy.zeros(len(dst), len(src))
    for col, e in enumerate(src):
        for i in range(m):
            if e[i] >= 2:
                t = list(e)
                t[i] -= 2
                A[dst[tuple(t)], col] += e[i] * (e[i] - 1)
    vecs = A.nullspace()
    out = []
    for v in vecs:
        out.append([Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in v])
    if len(out) != harmonic_dimension(m, k):
        raise ArithmeticError(f"kernel rank {len(out)} disagrees with dim H_k for m={m}, k={k}")
    return out


def expand_in_basis(p: MultiPoly, basis: HarmonicBasis, tol: float = 1e-10) -> np.ndarray:
    """Coefficients c_j = int p phi_j dS; raises :class:`NotInHkError` if p is not in H_k."""
    if p.m != basis.m:
        raise DimensionMismatch(f"polynomial in m={p.m}, basis in m={basis.m}")
    if p.is_zero():
        return np.zeros(basis.dim)
    if p.depends_on_x():
        raise NotInHkError("polynomial depends on x; expected a polynomial in u only")
    if not p.is_u_homogeneous(basis.k):
        raise NotInHkError(f"polynomial is not homogeneous of degree {basis.k} in u")
    index = {e: a for a, e in enumerate(basis.monomials)}
    vec = np.zeros(len(basis.monomials))
    for e, c in p.terms.items():
        vec[index[e[p.m:]]] = float(c)
    G = moment_gram(basis.monomials)
    c = basis.coeffs.T @ (G @ vec)
    residual = float(np.max(np.abs(basis.coeffs @ c - vec)))
    scale = max(1.0, float(np.max(np.abs(vec))))
    if residual > tol * scale:
        raise NotInHkError(f"polynomial is not harmonic: reconstruction residual {residual:.3e}")
    return c


def random_harmonic(basis: HarmonicBasis, rng: np.random.Generator) -> np.ndarray:
    """Random coefficient vector with unit Euclidean norm (so the L^2(S) norm is 1)."""
    c = rng.standard_normal(basis.dim)
    return c / np.linalg.norm(c)
