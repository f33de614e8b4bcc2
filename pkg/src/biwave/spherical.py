"""Spherical means, modified (descended) spherical means, and radial derivatives.

Profiles passed to :func:`radial_derivative_power` and :func:`time_derivative`
must be vectorized: they receive an array of abscissae of any shape and
return values of the same shape.
"""

from __future__ import annotations

import numpy as np

from .fields import FieldError, ScalarField, TrigPoly, _as_points
from .quadrature import QuadratureRule, sphere_area

__all__ = [
    "StencilError",
    "RadialProfile",
    "spherical_mean",
    "modified_spherical_mean",
    "radial_derivative_power",
    "time_derivative",
    "mean_profile",
]

# points per vectorized field call; bounds the temporary (points, nodes, n) array
_CHUNK = 1 << 20

# 4th-order central first derivative on offsets -2..2 (center weight is zero)
_D1_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_D1_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
# one Richardson level: (16 D_h - D_2h) / 15
_RICH_OFFSETS, _inv = np.unique(np.concatenate([_D1_OFFSETS, 2 * _D1_OFFSETS]), return_inverse=True)
_RICH_WEIGHTS = np.bincount(_inv, np.concatenate([16 * _D1_WEIGHTS, -_D1_WEIGHTS / 2]) / 15)
_REACH = float(np.max(np.abs(_RICH_OFFSETS)))


class StencilError(ValueError):
    pass


class RadialProfile:
    """A function of radius s > 0, e.g. s -> s^{n-2} M_s(phi)(x) at fixed x."""

    def __init__(self, fn, smoothness: int = 8, s_max: float = np.inf):
        self.fn = fn
        self.smoothness = smoothness
        self.s_max = s_max

    def __call__(self, s):
        return self.fn(np.asarray(s, dtype=float))


def _check_rule(rule: QuadratureRule, prefix: str, n: int):
    if not rule.domain.startswith(prefix) or rule.dim != n:
        raise FieldError(f"expected a {prefix}({n}) rule, got {rule.domain}")


def _weighted_sum(phi: ScalarField, x: np.ndarray, radii: np.ndarray, rule: QuadratureRule):
    nodes, weights = rule.nodes, rule.weights
    flat = radii.ravel()
    out = np.empty(flat.shape)
    step = max(1, _CHUNK // len(weights))
    if isinstance(phi, TrigPoly) and not phi.is_zero:
        # same nodes, cheaper evaluation: k.(x + r y) = k.x + r (k.y)
        kx, ky, alpha, beta = phi._phase_parts(x, nodes)
        step = max(1, step // len(alpha))
        for i in range(0, flat.size, step):
            phase = kx + flat[i:i + step, None, None] * ky
            vals = np.cos(phase) @ alpha
            if beta is not None:
                vals += np.sin(phase) @ beta
            out[i:i + step] = vals @ weights
        return out.reshape(radii.shape)
    for i in range(0, flat.size, step):
        r = flat[i:i + step]
        pts = x + r[:, None, None] * nodes[None, :, :]
        out[i:i + step] = phi._eval(pts) @ weights
    return out.reshape(radii.shape)


def spherical_mean(phi: ScalarField, x, R, rule: QuadratureRule):
    """(1/omega_n) * sum_i w_i phi(x + R y_i); vectorized over ``R``."""
    x = _as_points(x, phi.n)
    if x.ndim != 1:
        raise FieldError("spherical_mean takes a single centre point")
    _check_rule(rule, "sphere-surface", phi.n)
    R = np.asarray(R, dtype=float)
    if np.any(R < 0):
        raise ValueError("radius must be non-negative")
    out = _weighted_sum(phi, x, R, rule) / sphere_area(phi.n)
    at_zero = R == 0
    if np.any(at_zero):
        out = np.where(at_zero, float(phi._eval(x)), out)
    return float(out) if out.ndim == 0 else out


def modified_spherical_mean(phi: ScalarField, x, t, rule: QuadratureRule):
    """(2/omega_{n+1}) * sum_i w_i phi(x + t z_i) over a weighted-ball rule."""
    x = _as_points(x, phi.n)
    if x.ndim != 1:
        raise FieldError("modified_spherical_mean takes a single centre point")
    _check_rule(rule, "weighted-ball", phi.n)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    out = 2 * _weighted_sum(phi, x, t, rule) / sphere_area(phi.n + 1)
    at_zero = t == 0
    if np.any(at_zero):
        out = np.where(at_zero, float(phi._eval(x)), out)
    return float(out) if out.ndim == 0 else out


def mean_profile(phi: ScalarField, x, rule: QuadratureRule, power: int) -> RadialProfile:
    """s -> s^power * mean_s(phi)(x), the mean picked by the rule's domain."""
    mean = modified_spherical_mean if rule.domain.startswith("weighted-ball") else spherical_mean
    x = np.asarray(x, dtype=float)

    def g(s):
        return s ** power * mean(phi, x, s, rule)

    return RadialProfile(g)


def _derivative(g, s, h):
    pts = s[..., None] + h[..., None] * _RICH_OFFSETS
    vals = np.asarray(g(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise StencilError("non-finite samples in derivative stencil")
    # weights sum to zero; centring on the mean sample keeps constants exact
    vals = vals - vals.mean(axis=-1, keepdims=True)
    return (vals @ _RICH_WEIGHTS) / h


def radial_derivative_power(g, m: int, s, h_rel: float = 1e-3, domain=(0.0, np.inf)):
    """((1/s) d/ds)^m g evaluated at ``s`` (scalar or array).

    Each application is a 4th-order central difference with step h_rel*s and
    one Richardson level; ``g`` is called once with every stencil abscissa.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise StencilError("radial derivative needs s > 0")
    lo = s * (1 - _REACH * h_rel) ** m
    hi = s * (1 + _REACH * h_rel) ** m
    if m and (np.any(lo <= domain[0]) or np.any(hi > domain[1])):
        raise StencilError(f"stencil leaves the evaluable domain {domain} (s too small for h_rel={h_rel})")

    def apply(k, r):
        if k == 0:
            return np.asarray(g(r), dtype=float)
        return _derivative(lambda q: apply(k - 1, q), r, h_rel * r) / r

    out = apply(m, s)
    return float(out) if out.ndim == 0 else out


def time_derivative(g, t, h_rel: float = 1e-3):
    """d/dt g at t > 0 by the same Richardson-extrapolated central stencil."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise StencilError("time_derivative needs t > 0")
    out = _derivative(g, t, h_rel * t)
    return float(out) if out.ndim == 0 else out
