"""Numerical integration: Gauss-Legendre, iterated integrals, sphere and ball rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma, roots_gegenbauer

__all__ = [
    "QuadratureError",
    "QuadratureRule",
    "sphere_area",
    "gauss_legendre",
    "integrate_interval",
    "integrate_nested",
    "sphere_surface_rule",
    "weighted_ball_rule",
    "SPHERE_DIMS",
    "BALL_DIMS",
]

SPHERE_DIMS = range(2, 8)
BALL_DIMS = range(1, 7)


class QuadratureError(ValueError):
    pass


def sphere_area(n: int) -> float:
    """omega_n, surface area of the unit sphere in R^n (omega_1 = 2 counts two points)."""
    return 2 * math.pi ** (n / 2) / gamma(n / 2)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain: str
    dim: int

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.weights.shape[0]

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.asarray(f(self.nodes)) @ self.weights)


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise QuadratureError(f"Gauss-Legendre order must be a positive integer, got {order!r}")
    x, w = leggauss(int(order))
    return QuadratureRule(x, w, "interval", 1)


def integrate_interval(f, lo, hi, order: int = 32):
    """Gauss-Legendre estimate of the integral of a vectorized ``f`` over [lo, hi].

    ``lo`` and ``hi`` may be arrays of matching shape; the result then has
    that shape.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise QuadratureError("non-finite integration bounds")
    rule = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = mid[..., None] + half[..., None] * rule.nodes
    vals = np.asarray(f(s), dtype=float)
    out = half * (vals @ rule.weights)
    return float(out) if out.ndim == 0 else out


Bound = Union[float, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def integrate_nested(f, depth: int, bounds: Sequence[tuple[Bound, Bound]], order: int = 32):
    """Iterated integral of ``f`` over its innermost variable.

    ``bounds[0]`` is the outermost pair; each later pair may hold callables of
    the immediately enclosing variable, e.g. for
    int_{x-at}^{x+at} int_0^y int_0^tau f(w) dw dtau dy::

        integrate_nested(f, 3, [(x - a*t, x + a*t), (0, lambda y: y), (0, lambda tau: tau)])

    Outer bounds may be arrays, which vectorizes over independent integrals.
    """
    if depth not in (1, 2, 3):
        raise QuadratureError(f"depth must be 1, 2 or 3, got {depth!r}")
    if len(bounds) != depth or any(len(b) != 2 for b in bounds):
        raise QuadratureError(f"expected {depth} (lo, hi) bound pairs")
    if any(callable(v) for v in bounds[0]):
        raise QuadratureError("outermost bounds must be numbers")

    rule = gauss_legendre(order)

    def level(i, outer_var):
        lo, hi = bounds[i]
        lo = lo(outer_var) if callable(lo) else lo
        hi = hi(outer_var) if callable(hi) else hi
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if outer_var is not None:
            lo = np.broadcast_to(lo, np.shape(outer_var))
            hi = np.broadcast_to(hi, np.shape(outer_var))
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise QuadratureError(f"non-finite bounds at level {i}")
        half = 0.5 * (hi - lo)
        var = (0.5 * (hi + lo))[..., None] + half[..., None] * rule.nodes
        if i == depth - 1:
            vals = np.asarray(f(var), dtype=float)
        else:
            vals = level(i + 1, var)
        return half * (vals @ rule.weights)

    out = level(0, None)
    return float(out) if np.ndim(out) == 0 else out


def _circle(level: int):
    m = 2 * level
    theta = 2 * math.pi * np.arange(m) / m
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1), np.full(m, 2 * math.pi / m)


@lru_cache(maxsize=None)
def _sphere(n: int, level: int):
    if n == 2:
        return _circle(level)
    # y = (sqrt(1-u^2) y', u) with y' on S^{n-2}: dsigma = (1-u^2)^{(n-3)/2} du dsigma'
    inner_nodes, inner_w = _sphere(n - 1, level)
    u, wu = roots_gegenbauer(level, (n - 2) / 2)
    r = np.sqrt(1 - u * u)
    nodes = np.concatenate(
        [r[:, None, None] * inner_nodes[None, :, :],
         np.broadcast_to(u[:, None, None], (level, len(inner_w), 1))], axis=-1)
    return nodes.reshape(-1, n), (wu[:, None] * inner_w[None, :]).ravel()


def sphere_surface_rule(n: int, level: int) -> QuadratureRule:
    """Product rule on the unit sphere S^{n-1} in R^n.

    Uniform azimuthal grid of ``2*level`` points; each further polar
    coordinate u = cos(angle) uses ``level`` Gauss nodes for the weight
    (1-u^2)^{(k-3)/2} (Gauss-Legendre when k = 3). Weights sum to omega_n.
    """
    if n not in SPHERE_DIMS:
        raise QuadratureError(f"sphere rules support n in {list(SPHERE_DIMS)}, got {n}")
    if level < 1:
        raise QuadratureError(f"level must be >= 1, got {level}")
    nodes, weights = _sphere(n, level)
    return QuadratureRule(nodes.copy(), weights.copy(), f"sphere-surface({n})", n)


def weighted_ball_rule(n: int, level: int) -> QuadratureRule:
    """Rule for int_{B_n(0,1)} g(z) / sqrt(1 - |z|^2) dz.

    With z = r*theta and r = sin(alpha) the weight cancels:
    int_0^{pi/2} sin^{n-1}(alpha) int_{S^{n-1}} g(sin(alpha) theta) dsigma dalpha.
    Gauss-Legendre in alpha, the sphere rule in theta. Weights sum to
    omega_{n+1} / 2.
    """
    if n not in BALL_DIMS:
        raise QuadratureError(f"ball rules support n in {list(BALL_DIMS)}, got {n}")
    if level < 1:
        raise QuadratureError(f"level must be >= 1, got {level}")
    x, w = gauss_legendre(level).nodes, gauss_legendre(level).weights
    alpha = (x + 1) * math.pi / 4
    walpha = w * (math.pi / 4) * np.sin(alpha) ** (n - 1)
    if n == 1:
        dirs, wdir = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    else:
        dirs, wdir = _sphere(n, level)
    r = np.sin(alpha)
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    weights = (walpha[:, None] * wdir[None, :]).ravel()
    return QuadratureRule(nodes, weights, f"weighted-ball({n})", n)
