"""Deterministic product quadrature on S^{m-1}, R^{m-1} and B^m.

Sphere rules are built recursively: u_m = t carries Gauss-Jacobi nodes for
the weight (1 - t^2)^{(m-3)/2}, crossed with an S^{m-2} rule scaled by
sqrt(1 - t^2); the base case S^1 is the trapezoid rule.  Hyperplane rules use
polar coordinates around a centre with Gauss-Legendre panels in the radius
and a rational map r = b + s * scale / (1 - s) for the last, unbounded panel.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .budget import check_budget
from .errors import DomainError, QuadratureError
from .harmonic import omega

CHUNK = 4096


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes/weights for one integration domain.

    ``exactness_degree`` is the polynomial degree integrated exactly (sphere,
    ball) or ``None`` for mapped hyperplane rules, whose construction
    parameters live in ``params``.
    """

    domain: str
    m: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise ValueError("nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise QuadratureError(f"{self.domain} rule has non-positive weights")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def scaled(self, center, radius: float) -> "QuadratureRule":
        """Rule for the sphere/ball of given centre and radius (hyperplane rules: dilation about the origin)."""
        if radius <= 0:
            raise DomainError("radius must be positive")
        center = np.asarray(center, dtype=float)
        power = {"sphere": self.m - 1, "ball": self.m, "hyperplane": self.m - 1}[self.domain]
        return QuadratureRule(
            self.domain,
            self.m,
            center + radius * self.nodes,
            self.weights * radius**power,
            self.exactness_degree,
            dict(self.params, center=center.tolist(), radius=radius),
        )

    def rotated(self, Q: np.ndarray) -> "QuadratureRule":
        """Nodes mapped by the orthogonal matrix Q (weights unchanged)."""
        return QuadratureRule(self.domain, self.m, self.nodes @ Q.T, self.weights.copy(),
                              self.exactness_degree, dict(self.params))


def _gauss_jacobi(n: int, alpha: float, beta: float):
    # weight (1-t)^alpha (1+t)^beta on [-1, 1]
    if alpha == 0 and beta == 0:
        return roots_legendre(n)
    return roots_jacobi(n, alpha, beta)


def sphere_rule(m: int, degree: int) -> QuadratureRule:
    """Product rule on S^{m-1} exact for polynomials of total degree <= ``degree``."""
    if m < 2:
        raise DomainError(f"sphere rules need m >= 2, got {m}")
    if degree < 0:
        raise DomainError("degree must be non-negative")
    check_budget(_sphere_size(m, degree), f"sphere rule m={m}, degree={degree}")
    return _sphere_rule(m, degree)


def _sphere_size(m: int, degree: int) -> int:
    n = degree + 1
    for _ in range(3, m + 1):
        n *= (degree + 2) // 2
    return n


@lru_cache(maxsize=64)
def _sphere_rule(m: int, degree: int) -> QuadratureRule:
    nodes, weights = _sphere_nodes(m, degree)
    return QuadratureRule("sphere", m, nodes, weights, degree)


def _sphere_nodes(m: int, degree: int):
    if m == 2:
        n = degree + 1
        theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(theta), np.sin(theta)]), np.full(n, 2.0 * np.pi / n)
    n = degree // 2 + 1
    t, wt = _gauss_jacobi(n, (m - 3) / 2.0, (m - 3) / 2.0)
    sub, wsub = _sphere_nodes(m - 1, degree)
    rho = np.sqrt(1.0 - t * t)
    nodes = np.concatenate([np.column_stack([r * sub, np.full(sub.shape[0], ti)]) for r, ti in zip(rho, t)])
    weights = np.concatenate([w * wsub for w in wt])
    return nodes, weights


def ball_rule(m: int, degree: int) -> QuadratureRule:
    """Product rule on B^m exact for polynomials of total degree <= ``degree``."""
    if m < 2:
        raise DomainError(f"ball rules need m >= 2, got {m}")
    n = degree // 2 + 1
    check_budget(n * _sphere_size(m, degree), f"ball rule m={m}, degree={degree}")
    return _ball_rule(m, degree)


@lru_cache(maxsize=32)
def _ball_rule(m: int, degree: int) -> QuadratureRule:
    n = degree // 2 + 1
    s, ws = _gauss_jacobi(n, 0.0, float(m - 1))
    r = (1.0 + s) / 2.0
    wr = ws * 0.5**m
    S = _sphere_rule(m, degree)
    nodes = np.concatenate([ri * S.nodes for ri in r])
    weights = np.concatenate([wi * S.weights for wi in wr])
    return QuadratureRule("ball", m, nodes, weights, degree)


def radial_rule(order: int, scale: float = 1.0, breakpoints: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^inf F(r) dr.

    Gauss-Legendre with ``order`` points on each finite panel between
    consecutive breakpoints, and on the final panel [b, inf) the map
    r = b + scale_b * s / (1 - s), scale_b = max(b, scale).
    """
    if order < 1:
        raise DomainError("radial order must be positive")
    if scale <= 0:
        raise DomainError("radial scale must be positive")
    b = [0.0] + [float(v) for v in breakpoints]
    if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
        raise DomainError("breakpoints must be strictly increasing and positive")
    x, w = roots_legendre(order)
    s = (x + 1.0) / 2.0
    ws = w / 2.0
    rs, wr = [], []
    for lo, hi in zip(b, b[1:]):
        rs.append(lo + (hi - lo) * s)
        wr.append((hi - lo) * ws)
    lo = b[-1]
    sc = max(lo, scale)
    rs.append(lo + sc * s / (1.0 - s))
    wr.append(ws * sc / (1.0 - s) ** 2)
    return np.concatenate(rs), np.concatenate(wr)


def hyperplane_rule(m: int, radial_order: int, angular_degree: int, scale: float = 1.0,
                    center=None, breakpoints: Sequence[float] = ()) -> QuadratureRule:
    """Rule for int_{R^{m-1}} F(t') dt' in polar coordinates about ``center``.

    Accurate for integrands that are smooth on the radial scales fixed by
    ``scale``/``breakpoints`` and decay like |t'|^{-m} or faster; slower decay
    converges but without a guaranteed rate.
    """
    if m < 3:
        raise DomainError(f"hyperplane rules need m >= 3, got {m}")
    n_ang = _sphere_size(m - 1, angular_degree)
    n_rad = radial_order * (len(breakpoints) + 1)
    check_budget(n_ang * n_rad, f"hyperplane rule m={m}")
    r, wr = radial_rule(radial_order, scale, breakpoints)
    S = _sphere_rule(m - 1, angular_degree)
    nodes = (r[:, None, None] * S.nodes[None, :, :]).reshape(-1, m - 1)
    weights = (wr[:, None] * r[:, None] ** (m - 2) * S.weights[None, :]).reshape(-1)
    if center is not None:
        nodes = nodes + np.asarray(center, dtype=float)
    params = {
        "radial_order": radial_order,
        "angular_degree": angular_degree,
        "scale": scale,
        "breakpoints": [float(v) for v in breakpoints],
        "center": None if center is None else np.asarray(center, dtype=float).tolist(),
        "outer_radius": float(r.max()),
    }
    return QuadratureRule("hyperplane", m, nodes, weights, None, params)


def graded_breakpoints(inner: float, outer: float, ratio: float = 2.0) -> list[float]:
    """Geometric breakpoints inner, inner*ratio, ... stopping once ``outer`` is reached."""
    if inner <= 0 or outer <= inner:
        return [inner] if inner > 0 else []
    out = [inner]
    while out[-1] * ratio < outer:
        out.append(out[-1] * ratio)
    out.append(outer)
    return out


def householder_to(target: np.ndarray) -> np.ndarray:
    """Orthogonal matrix mapping e_m to the unit vector ``target``."""
    target = np.asarray(target, dtype=float)
    m = target.shape[0]
    em = np.zeros(m)
    em[-1] = 1.0
    w = em - target
    n2 = float(np.dot(w, w))
    if n2 < 1e-30:
        return np.eye(m)
    return np.eye(m) - 2.0 * np.outer(w, w) / n2


def focused_sphere_rule(m: int, focus, width: float, order: int, angular_degree: int,
                        ratio: float = 2.0) -> QuadratureRule:
    """Sphere rule graded toward the direction ``focus``.

    The polar angle theta from ``focus`` is split into panels
    [0, width], [width, 2 width], ... up to pi with ``order`` Gauss-Legendre
    points each (weight sin^{m-2} theta folded in); the azimuthal sphere
    S^{m-2} uses a degree-``angular_degree`` rule.  Suited to integrands with
    a peak of angular width ``width`` at ``focus``.
    """
    if m < 3:
        raise DomainError("focused sphere rules need m >= 3")
    focus = np.asarray(focus, dtype=float)
    nf = float(np.linalg.norm(focus))
    if nf == 0:
        raise DomainError("focus direction must be nonzero")
    width = min(max(width, 1e-12), np.pi)
    br = graded_breakpoints(width, np.pi, ratio)
    edges = [0.0] + [b for b in br if b < np.pi] + [np.pi]
    check_budget(order * (len(edges) - 1) * _sphere_size(m - 1, angular_degree), "focused sphere rule")
    x, w = roots_legendre(order)
    thetas, wts = [], []
    for lo, hi in zip(edges, edges[1:]):
        thetas.append(lo + (hi - lo) * (x + 1) / 2)
        wts.append((hi - lo) * w / 2)
    theta = np.concatenate(thetas)
    wt = np.concatenate(wts) * np.sin(theta) ** (m - 2)
    S = _sphere_rule(m - 1, angular_degree)
    nodes = np.concatenate([np.column_stack([np.sin(th) * S.nodes, np.full(S.size, np.cos(th))]) for th in theta])
    weights = np.concatenate([wi * S.weights for wi in wt])
    Q = householder_to(focus / nf)
    nodes = nodes @ Q.T
    keep = weights > 0
    return QuadratureRule("sphere", m, nodes[keep], weights[keep], None,
                          {"focus": (focus / nf).tolist(), "width": width, "order": order,
                           "angular_degree": angular_degree})


def integrate(rule: QuadratureRule, f: Callable, vectorized: bool = True, workers: int | None = None):
    """sum_i w_i f(node_i).

    ``f`` takes an (N, d) node array and returns shape (N,) or (N, ...) when
    ``vectorized``; otherwise it is called per node.  Partial sums are formed
    over fixed-size node chunks and added in chunk order, so the result does
    not depend on ``workers``.
    """
    n = rule.size
    starts = list(range(0, n, CHUNK))

    def chunk_sum(start: int):
        stop = min(start + CHUNK, n)
        pts = rule.nodes[start:stop]
        if vectorized:
            vals = np.asarray(f(pts), dtype=float)
        else:
            vals = np.array([f(p) for p in pts], dtype=float)
        if vals.shape[0] != stop - start:
            raise QuadratureError(f"integrand returned {vals.shape[0]} values for {stop - start} nodes")
        bad = ~np.isfinite(vals.reshape(vals.shape[0], -1)).all(axis=1)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise QuadratureError(f"non-finite integrand value at node {start + i}: {pts[i].tolist()}")
        w = rule.weights[start:stop].reshape((-1,) + (1,) * (vals.ndim - 1))
        return np.sum(w * vals, axis=0)

    if workers and workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk_sum, starts))
    else:
        parts = [chunk_sum(s) for s in starts]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return float(total) if np.ndim(total) == 0 else total


def required_sphere_degree(k: int, extra: int = 2) -> int:
    """Degree 2k + extra: products of two H_k elements plus slack."""
    return 2 * k + extra
