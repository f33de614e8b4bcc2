"""Isotropic elastodynamics via biwave potentials.

With a^2 = (lambda + 2 mu)/rho and b^2 = mu/rho, the displacement

    u = (d_tt - a^2 Lap) w + (a^2 - b^2) grad div w

solves the Navier equation (d_tt - b^2 Lap) u - (a^2 - b^2) grad div u = f/rho
whenever each component of w solves the biwave equation with right-hand side
f/rho. Everything here is finite differences on evaluators; there is no
symbolic path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fields import BiwaveParams, FieldError, ForcingField, ParamError, make_params
from .verification import D1, D2, ResidualReport, _probes, fold_even, fold_odd

__all__ = [
    "ElasticParams",
    "VectorFieldEvaluator",
    "lame_to_speeds",
    "cks_displacement",
    "navier_residual",
    "memoized",
]

# 4th-order central stencils on offsets -2..2
_OFF, _W1 = D1
_W2 = D2[1]


@dataclass(frozen=True)
class ElasticParams:
    lam: float
    mu: float
    rho: float

    def __post_init__(self):
        for name in ("lam", "mu", "rho"):
            if not math.isfinite(getattr(self, name)):
                raise ParamError("non-finite", f"{name} is not finite")
        if self.mu <= 0:
            raise ParamError("shear-modulus", f"mu must be positive, got {self.mu}")
        if self.rho <= 0:
            raise ParamError("density", f"rho must be positive, got {self.rho}")
        if not self.lam + 2 * self.mu > self.mu:
            raise ParamError("ordering", f"lambda + mu must be positive, got {self.lam + self.mu}")


def lame_to_speeds(ep: ElasticParams, n: int = 3) -> BiwaveParams:
    return make_params(math.sqrt((ep.lam + 2 * ep.mu) / ep.rho), math.sqrt(ep.mu / ep.rho), n)


class VectorFieldEvaluator:
    """n components (x[P, n], t[P]) -> values[P]; calling returns a (P, n) array."""

    def __init__(self, components: Sequence[Callable], n: int, joint: Callable | None = None):
        if len(components) != n and joint is None:
            raise FieldError(f"need {n} components, got {len(components)}")
        self.components = tuple(components)
        self.n = n
        self._joint = joint

    def __call__(self, x, t) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:1])
        if self._joint is not None:
            return self._joint(x, t)
        return np.stack([np.asarray(c(x, t), dtype=float) for c in self.components], axis=-1)


def memoized(fn: Callable, decimals: int = 12) -> Callable:
    """Cache a scalar evaluator on coordinates rounded to ``decimals``.

    Stacked stencils revisit lattice points reached along different
    floating-point paths; rounding merges them.
    """
    cache: dict[bytes, float] = {}

    def wrapped(xs, ts):
        pts = np.round(np.column_stack([xs, ts]), decimals) + 0.0
        uniq, inv = np.unique(pts, axis=0, return_inverse=True)
        keys = [row.tobytes() for row in uniq]
        missing = [i for i, k in enumerate(keys) if k not in cache]
        if missing:
            vals = np.asarray(fn(uniq[missing, :-1], uniq[missing, -1]), dtype=float)
            for i, v in zip(missing, vals):
                cache[keys[i]] = float(v)
        return np.array([cache[k] for k in keys])[inv.ravel()]

    return wrapped


def _derivatives(evaluate, n, xs, ts, h):
    """FD second derivatives of a vector field at points (xs, ts).

    Returns d_tt (C, P), Lap (C, P) and the Hessian d_p d_q (n, n, C, P).
    """
    offsets: dict[tuple, int] = {}

    def idx(v, dt=0):
        return offsets.setdefault(tuple(v) + (dt,), len(offsets))

    def unit(p, i):
        v = [0] * n
        v[p] = int(i)
        return v

    i_tt = [idx([0] * n, int(j)) for j in _OFF]
    i_ax = [[idx(unit(p, i)) for i in _OFF] for p in range(n)]
    i_mix = {}
    for p in range(n):
        for q in range(p + 1, n):
            grid = []
            for i in _OFF:
                row = []
                for j in _OFF:
                    v = [0] * n
                    v[p] += int(i)
                    v[q] += int(j)
                    row.append(idx(v))
                grid.append(row)
            i_mix[p, q] = np.array(grid)

    offs = np.array(list(offsets), dtype=float)
    P, S = len(ts), len(offs)
    px = (xs[:, None, :] + h * offs[None, :, :n]).reshape(-1, n)
    pt = (ts[:, None] + h * offs[None, :, n]).reshape(-1)
    V = np.asarray(evaluate(px, pt)).reshape(P, S, -1)
    V = np.moveaxis(V, -1, 0)  # (C, P, S)

    d_tt = fold_even(V[:, :, i_tt], _W2) / h ** 2
    hess = np.zeros((n, n) + V.shape[:2])
    for p in range(n):
        hess[p, p] = fold_even(V[:, :, i_ax[p]], _W2) / h ** 2
    for (p, q), grid in i_mix.items():
        hess[p, q] = hess[q, p] = fold_odd(fold_odd(V[:, :, grid], _W1), _W1) / h ** 2
    lap = np.trace(hess, axis1=0, axis2=1)
    return d_tt, lap, hess


def cks_displacement(w: VectorFieldEvaluator, params: BiwaveParams, h: float = 1e-2) -> VectorFieldEvaluator:
    """u = (d_tt - a^2 Lap) w + (a^2 - b^2) grad div w, componentwise FD."""
    n = w.n
    if params.n != n:
        raise FieldError(f"potential has {n} components, params n={params.n}")
    a2, gap = params.a ** 2, params.gap

    def joint(xs, ts):
        d_tt, lap, hess = _derivatives(w, n, xs, ts, h)
        grad_div = np.einsum("pqqP->pP", hess)
        return (d_tt - a2 * lap + gap * grad_div).T

    return VectorFieldEvaluator((), n, joint=joint)


def navier_residual(u: VectorFieldEvaluator, f: Sequence[ForcingField] | None, ep: ElasticParams,
                    probes, h: float = 1e-2) -> ResidualReport:
    """(d_tt - b^2 Lap) u - (a^2 - b^2) grad div u - f/rho at each probe.

    Reports the max over probes and components; scale is max |d_tt u|.
    """
    n = u.n
    xs, ts = _probes(n, probes)
    if np.any(ts < 2 * h):
        raise FieldError(f"probes need t >= 2h = {2 * h}")
    params = lame_to_speeds(ep, n)
    d_tt, lap, hess = _derivatives(u, n, xs, ts, h)
    grad_div = np.einsum("pqqP->pP", hess)
    res = d_tt - params.b ** 2 * lap - params.gap * grad_div
    if f is not None:
        if len(f) != n:
            raise FieldError("forcing needs one component per dimension")
        rhs = np.stack([np.array([float(fk(x, t)) for x, t in zip(xs, ts)]) for fk in f])
        res = res - rhs / ep.rho
    return ResidualReport.from_residuals(res, d_tt)
