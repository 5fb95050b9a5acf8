"""Clifford algebra Cl_m with e_i e_j + e_j e_i = -2 delta_ij, and the conformal maps built on it.

Multivectors are dense arrays of 2**m coefficients indexed by blade bitmask
(bit i-1 set <=> e_i is a factor).  Vectors embed as x = sum_j x_j e_j, so
x*x = -|x|^2.

Möbius transforms carry Vahlen coefficients (a, b, c, d) acting as
y = (a x + b)(c x + d)^{-1}; they are only ever produced by the primitive
factories (translation, dilation, reflection, inversion) and composition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DomainError, PoleError

MAX_DIMENSION = 16
POLE_TOL = 1e-12


@lru_cache(maxsize=None)
def _blade_product_sign(a: int, b: int) -> int:
    # swaps needed to bring e_A e_B into canonical order
    swaps = 0
    s = a >> 1
    while s:
        swaps += bin(s & b).count("1")
        s >>= 1
    # each shared generator contributes e_i^2 = -1
    swaps += bin(a & b).count("1")
    return -1 if swaps & 1 else 1


def _grade(blade: int) -> int:
    return bin(blade).count("1")


class Multivector:
    """Immutable element of Cl_m."""

    __slots__ = ("m", "_c")

    def __init__(self, m: int, coefficients):
        if not 1 <= m <= MAX_DIMENSION:
            raise DomainError(f"dimension m={m} outside 1..{MAX_DIMENSION}")
        c = np.array(coefficients, dtype=float)
        if c.shape != (1 << m,):
            raise DimensionMismatch(f"expected {1 << m} coefficients for m={m}, got shape {c.shape}")
        c.setflags(write=False)
        self.m = m
        self._c = c

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, m: int) -> "Multivector":
        return cls(m, np.zeros(1 << m))

    @classmethod
    def scalar(cls, m: int, value: float) -> "Multivector":
        c = np.zeros(1 << m)
        c[0] = value
        return cls(m, c)

    @classmethod
    def vector(cls, xs: Sequence[float]) -> "Multivector":
        xs = np.asarray(xs, dtype=float)
        m = xs.shape[0]
        c = np.zeros(1 << m)
        for j in range(m):
            c[1 << j] = xs[j]
        return cls(m, c)

    @classmethod
    def blade(cls, m: int, indices: Sequence[int], value: float = 1.0) -> "Multivector":
        """The product e_{i1} e_{i2} ... (1-based indices, any order) times ``value``."""
        out = cls.scalar(m, value)
        for i in indices:
            if not 1 <= i <= m:
                raise DomainError(f"basis index {i} outside 1..{m}")
            out = out * cls.basis_vector(m, i)
        return out

    @classmethod
    def basis_vector(cls, m: int, i: int) -> "Multivector":
        c = np.zeros(1 << m)
        c[1 << (i - 1)] = 1.0
        return cls(m, c)

    # -- accessors --------------------------------------------------------
    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    def __getitem__(self, blade: int) -> float:
        return float(self._c[blade])

    def scalar_part(self) -> float:
        return float(self._c[0])

    def grade_part(self, r: int) -> "Multivector":
        mask = np.array([_grade(i) == r for i in range(1 << self.m)])
        return Multivector(self.m, np.where(mask, self._c, 0.0))

    def to_vector(self, tol: float = 1e-12) -> np.ndarray:
        """Grade-1 coefficients; raises if the element carries other grades beyond ``tol``."""
        idx = [1 << j for j in range(self.m)]
        vec = self._c[idx].copy()
        rest = self._c.copy()
        rest[idx] = 0.0
        scale = max(1.0, float(np.max(np.abs(self._c))))
        if np.max(np.abs(rest)) > tol * scale:
            raise DomainError("multivector is not a vector")
        return vec

    def norm(self) -> float:
        """Euclidean norm of the coefficient array, |a|^2 = sum_A a_A^2."""
        return float(np.sqrt(np.dot(self._c, self._c)))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Multivector"):
        if other.m != self.m:
            raise DimensionMismatch(f"Cl_{self.m} and Cl_{other.m} elements cannot be combined")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Multivector.scalar(self.m, other)
        self._check(other)
        return Multivector(self.m, self._c + other._c)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.m, -self._c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector(self.m, self._c * float(other))
        return geometric_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector(self.m, self._c * float(other))
        return NotImplemented

    def __truediv__(self, other):
        return Multivector(self.m, self._c / float(other))

    def reverse(self) -> "Multivector":
        return reversion(self)

    def inverse(self) -> "Multivector":
        return clifford_inverse(self)

    def allclose(self, other: "Multivector", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self._c, other._c, rtol=0.0, atol=atol))

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.m == other.m and bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash((self.m, self._c.tobytes()))

    def __repr__(self):
        terms = []
        for blade in np.flatnonzero(self._c):
            idx = "".join(str(j + 1) for j in range(self.m) if blade >> j & 1)
            terms.append(f"{self._c[blade]:+g}" + (f"*e{idx}" if idx else ""))
        return f"Multivector(m={self.m}: {' '.join(terms) or '0'})"


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    if a.m != b.m:
        raise DimensionMismatch(f"Cl_{a.m} and Cl_{b.m} elements cannot be multiplied")
    ca, cb = a.coefficients, b.coefficients
    out = np.zeros(1 << a.m)
    nb = np.flatnonzero(cb)
    for i in np.flatnonzero(ca):
        ai = ca[i]
        for j in nb:
            out[i ^ j] += _blade_product_sign(int(i), int(j)) * ai * cb[j]
    return Multivector(a.m, out)


def reversion(a: Multivector) -> Multivector:
    c = a.coefficients.copy()
    for blade in range(c.shape[0]):
        r = _grade(blade)
        if (r * (r - 1) // 2) & 1:
            c[blade] = -c[blade]
    return Multivector(a.m, c)


def _left_matrix(a: Multivector) -> np.ndarray:
    n = 1 << a.m
    L = np.zeros((n, n))
    ca = a.coefficients
    for i in np.flatnonzero(ca):
        for j in range(n):
            L[i ^ j, j] += _blade_product_sign(int(i), j) * ca[i]
    return L


def clifford_inverse(a: Multivector) -> Multivector:
    """Two-sided inverse.  Clifford-group elements use a^{-1} = rev(a) / (a rev(a)); others a linear solve."""
    rev = reversion(a)
    q = geometric_product(a, rev)
    s = q.scalar_part()
    rest = q.coefficients.copy()
    rest[0] = 0.0
    scale = a.norm() ** 2
    if scale == 0.0:
        raise PoleError("zero multivector has no inverse")
    if abs(s) > POLE_TOL * scale and np.max(np.abs(rest)) <= 1e-13 * scale:
        return rev / s
    L = _left_matrix(a)
    one = np.zeros(1 << a.m)
    one[0] = 1.0
    if abs(np.linalg.det(L)) < POLE_TOL:
        raise PoleError("multivector is not invertible")
    return Multivector(a.m, np.linalg.solve(L, one))


def vector_inverse(x: Multivector) -> Multivector:
    """x^{-1} = -x/|x|^2 for a nonzero vector."""
    v = x.to_vector()
    n2 = float(np.dot(v, v))
    if n2 == 0.0:
        raise DomainError("zero vector has no inverse")
    return Multivector.vector(-v / n2)


def sandwich(a, u) -> np.ndarray:
    """Normalised sandwich a u a / |a|^2, i.e. reflection of u across the hyperplane orthogonal to a.

    Accepts :class:`Multivector` vectors or plain arrays; the Clifford product is
    evaluated literally and the grade-1 result returned as an array.
    """
    A = a if isinstance(a, Multivector) else Multivector.vector(a)
    U = u if isinstance(u, Multivector) else Multivector.vector(u)
    av = A.to_vector()
    n2 = float(np.dot(av, av))
    if n2 == 0.0:
        raise DomainError("sandwich with zero vector")
    return (A * U * A).to_vector() / n2


def reflect(a: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Vectorised u - 2<u,a>a/|a|^2 (same map as :func:`sandwich`), broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    u = np.asarray(u, dtype=float)
    n2 = np.sum(a * a, axis=-1, keepdims=True)
    return u - 2.0 * np.sum(u * a, axis=-1, keepdims=True) / n2 * a


def reflection_matrix(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return np.eye(a.shape[-1]) - 2.0 * np.outer(a, a) / np.dot(a, a)


def sandwich_matrix(q: Multivector) -> np.ndarray:
    """Matrix of u -> rev(q) u q / |q|^2 on R^m (orthogonal when q is a Clifford-group element)."""
    n2 = q.norm() ** 2
    if n2 == 0.0:
        raise PoleError("sandwich by zero element")
    rq = reversion(q)
    cols = []
    for i in range(1, q.m + 1):
        cols.append((rq * Multivector.basis_vector(q.m, i) * q).to_vector(tol=1e-9) / n2)
    return np.column_stack(cols)


# ---------------------------------------------------------------------------
# Möbius transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Primitive:
    kind: str  # "translation" | "dilation" | "reflection" | "inversion"
    parameter: object = None

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "translation":
            return x + self.parameter
        if self.kind == "dilation":
            return self.parameter * x
        if self.kind == "reflection":
            return reflect(self.parameter, x)
        n2 = float(np.dot(x, x))
        if n2 < POLE_TOL**2:
            raise PoleError("inversion at the origin")
        return -x / n2


@dataclass(frozen=True)
class MoebiusTransform:
    """y = (a x + b)(c x + d)^{-1}.  ``factors`` lists primitives in application order."""

    m: int
    a: Multivector
    b: Multivector
    c: Multivector
    d: Multivector
    factors: tuple = field(default=())

    # -- factories --------------------------------------------------------
    @classmethod
    def identity(cls, m: int) -> "MoebiusTransform":
        one, zero = Multivector.scalar(m, 1.0), Multivector.zero(m)
        return cls(m, one, zero, zero, one, ())

    @classmethod
    def translation(cls, b) -> "MoebiusTransform":
        b = np.asarray(b, dtype=float)
        m = b.shape[0]
        one, zero = Multivector.scalar(m, 1.0), Multivector.zero(m)
        return cls(m, one, Multivector.vector(b), zero, one, (Primitive("translation", b),))

    @classmethod
    def dilation(cls, m: int, factor: float) -> "MoebiusTransform":
        if factor <= 0:
            raise DomainError("dilation factor must be positive")
        s = float(np.sqrt(factor))
        zero = Multivector.zero(m)
        return cls(m, Multivector.scalar(m, s), zero, zero, Multivector.scalar(m, 1.0 / s),
                   (Primitive("dilation", float(factor)),))

    @classmethod
    def reflection(cls, a) -> "MoebiusTransform":
        a = np.asarray(a, dtype=float)
        n = float(np.linalg.norm(a))
        if n == 0.0:
            raise DomainError("reflection across zero vector")
        a = a / n
        A = Multivector.vector(a)
        zero = Multivector.zero(a.shape[0])
        # y = a x a = (a x)(-a)^{-1}
        return cls(a.shape[0], A, zero, zero, -A, (Primitive("reflection", a),))

    @classmethod
    def inversion(cls, m: int) -> "MoebiusTransform":
        one, zero = Multivector.scalar(m, 1.0), Multivector.zero(m)
        return cls(m, zero, one, one, zero, (Primitive("inversion"),))

    # -- composition ------------------------------------------------------
    def __matmul__(self, inner: "MoebiusTransform") -> "MoebiusTransform":
        """``self @ inner`` is the map x -> self(inner(x))."""
        if inner.m != self.m:
            raise DimensionMismatch("cannot compose transforms of different dimension")
        a, b, c, d = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = inner.a, inner.b, inner.c, inner.d
        return MoebiusTransform(
            self.m,
            a * a2 + b * c2,
            a * b2 + b * d2,
            c * a2 + d * c2,
            c * b2 + d * d2,
            inner.factors + self.factors,
        )

    def then(self, outer: "MoebiusTransform") -> "MoebiusTransform":
        return outer @ self

    def inverse(self) -> "MoebiusTransform":
        out = MoebiusTransform.identity(self.m)
        for p in self.factors:
            if p.kind == "translation":
                step = MoebiusTransform.translation(-p.parameter)
            elif p.kind == "dilation":
                step = MoebiusTransform.dilation(self.m, 1.0 / p.parameter)
            elif p.kind == "reflection":
                step = MoebiusTransform.reflection(p.parameter)
            else:
                step = MoebiusTransform.inversion(self.m)
            out = out @ step
        return out

    # -- evaluation -------------------------------------------------------
    def denominator(self, x) -> Multivector:
        return self.c * Multivector.vector(x) + self.d

    def __call__(self, x) -> np.ndarray:
        return mobius_eval(self, x)

    def evaluate_factors(self, x) -> np.ndarray:
        y = np.asarray(x, dtype=float)
        for p in self.factors:
            y = p.apply(y)
        return y

    def conformal_factor(self, x) -> float:
        """|c x + d|; the map scales lengths at x by |c x + d|^{-2}."""
        return self.denominator(x).norm()

    def rotation(self, x) -> np.ndarray:
        """Matrix of u -> rev(cx+d) u (cx+d) / |cx+d|^2."""
        return sandwich_matrix(self.denominator(x))


def mobius_eval(T: MoebiusTransform, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (T.m,):
        raise DimensionMismatch(f"point of shape {x.shape} for transform on R^{T.m}")
    X = Multivector.vector(x)
    den = T.c * X + T.d
    scale = max(1.0, T.c.norm() * float(np.linalg.norm(x)) + T.d.norm())
    if den.norm() < POLE_TOL * scale:
        raise PoleError(f"point {x.tolist()} is mapped to infinity")
    return ((T.a * X + T.b) * clifford_inverse(den)).to_vector(tol=1e-8)


# ---------------------------------------------------------------------------
# Cayley transform between the unit ball and a half-space
# ---------------------------------------------------------------------------

CONVENTIONS = ("literal", "reflected")


def _check_convention(convention: str):
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown Cayley convention {convention!r}; expected one of {CONVENTIONS}")


def cayley_transform(m: int, convention: str = "reflected") -> MoebiusTransform:
    """The Cayley map as a composed Möbius transform.

    ``"literal"`` is z = -(1/2)(x + e_m)(e_m x + 1)^{-1}, which sends B^m to
    {z_m < 0}.  ``"reflected"`` post-composes with z_m -> -z_m and sends B^m
    to {z_m > 0}; it equals z = -e_m/2 + (x - e_m)^{-1}.
    """
    _check_convention(convention)
    em = np.zeros(m)
    em[-1] = 1.0
    T = MoebiusTransform.translation(-em)
    T = MoebiusTransform.inversion(m) @ T
    if convention == "literal":
        T = MoebiusTransform.reflection(em) @ T
        return MoebiusTransform.translation(em / 2) @ T
    return MoebiusTransform.translation(-em / 2) @ T


def cayley(x, convention: str = "literal") -> np.ndarray:
    """Direct evaluation of the Cayley map; vectorised over leading axes of ``x``."""
    _check_convention(convention)
    x = np.asarray(x, dtype=float)
    den = _pole_distance_sq(x)
    r2 = np.sum(x * x, axis=-1)
    out = -x / den[..., None]
    out[..., -1] = -(1.0 - r2) / (2.0 * den)
    if convention == "reflected":
        out[..., -1] = -out[..., -1]
    return out


def cayley_clifford(x, convention: str = "literal") -> np.ndarray:
    """The Cayley formula evaluated literally with Clifford products (single point)."""
    _check_convention(convention)
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    X = Multivector.vector(x)
    em = Multivector.basis_vector(m, m)
    den = em * X + 1.0
    if den.norm() < POLE_TOL:
        raise PoleError("Cayley transform evaluated at e_m")
    z = ((X + em) * clifford_inverse(den) * -0.5).to_vector(tol=1e-9)
    if convention == "reflected":
        z[-1] = -z[-1]
    return z


def cayley_inverse(z, convention: str = "literal") -> np.ndarray:
    """Inverse Cayley map, x = e_m + (z~ + e_m/2)^{-1} with z~ the reflected-convention point."""
    _check_convention(convention)
    z = np.array(z, dtype=float)
    if convention == "literal":
        z[..., -1] = -z[..., -1]
    w = z.copy()
    w[..., -1] += 0.5
    n2 = np.sum(w * w, axis=-1)
    if np.any(n2 < POLE_TOL**2):
        raise PoleError("point at infinity has no Cayley preimage")
    x = -w / n2[..., None]
    x[..., -1] += 1.0
    return x


def _pole_distance_sq(x: np.ndarray) -> np.ndarray:
    # |e_m x + 1|^2 = |x - e_m|^2
    d = x.copy()
    d[..., -1] -= 1.0
    den = np.sum(d * d, axis=-1)
    if np.any(den < POLE_TOL**2):
        raise PoleError("Cayley transform evaluated at e_m")
    return den


def cayley_jacobian(zeta) -> np.ndarray:
    """Surface Jacobian |e_m zeta + 1|^{-2m+2} of the sphere-to-hyperplane Cayley map."""
    zeta = np.asarray(zeta, dtype=float)
    m = zeta.shape[-1]
    return _pole_distance_sq(zeta) ** (1 - m)


def cayley_jacobian_clifford(zeta) -> float:
    zeta = np.asarray(zeta, dtype=float)
    m = zeta.shape[0]
    q = Multivector.basis_vector(m, m) * Multivector.vector(zeta) + 1.0
    n = q.norm()
    if n < POLE_TOL:
        raise PoleError("Cayley Jacobian evaluated at e_m")
    return n ** (-2 * m + 2)


def cayley_jacobian_fd(zeta, convention: str = "reflected", step: float = 1e-5) -> float:
    """Finite-difference surface Jacobian of zeta -> cayley(zeta)' via a tangent-plane chart."""
    zeta = np.asarray(zeta, dtype=float)
    m = zeta.shape[0]
    # orthonormal tangent basis from a QR of [zeta | I]
    q, _ = np.linalg.qr(np.column_stack([zeta, np.eye(m)]))
    tangent = q[:, 1:m]

    def chart(s):
        p = zeta + tangent @ s
        return cayley(p / np.linalg.norm(p), convention)[:-1]

    jac = np.empty((m - 1, m - 1))
    for i in range(m - 1):
        e = np.zeros(m - 1)
        e[i] = step
        jac[:, i] = (chart(e) - chart(-e)) / (2 * step)
    return float(abs(np.linalg.det(jac)))


def cayley_rotation(x, convention: str = "reflected") -> np.ndarray:
    """Orthogonal matrix u -> rev(q) u q / |q|^2 with q the Cayley denominator at x.

    For ``"literal"`` q = e_m x + 1; for ``"reflected"`` q = x - e_m.  Vectorised:
    ``x`` of shape (..., m) gives (..., m, m).
    """
    _check_convention(convention)
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    w = x.copy()
    w[..., -1] -= 1.0
    n2 = np.sum(w * w, axis=-1)
    if np.any(n2 < POLE_TOL**2):
        raise PoleError("Cayley rotation at e_m")
    R = np.eye(m) - 2.0 * w[..., :, None] * w[..., None, :] / n2[..., None, None]
    if convention == "literal":
        # rev(e_m x + 1) u (e_m x + 1) = R_{x-e_m}(R_{e_m} u)
        S = np.eye(m)
        S[-1, -1] = -1.0
        R = R @ S
    return R
