"""Solver-independent checks: discrete biwave residual, error norms, IC probes."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .fields import EvalGrid, FieldError, InitialData, SolutionEvaluator

__all__ = [
    "VerificationError",
    "ResidualReport",
    "ErrorNorms",
    "fd_weights",
    "biwave_residual",
    "compare",
    "initial_probe",
    "SCALE_FLOOR",
    "fold_even",
    "fold_odd",
]

SCALE_FLOOR = 1e-14


class VerificationError(ValueError):
    pass


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    scale: float
    relative: float
    probes: int

    @classmethod
    def from_residuals(cls, residuals, leading) -> ResidualReport:
        max_abs = float(np.max(np.abs(residuals)))
        scale = float(np.max(np.abs(leading)))
        return cls(max_abs, scale, max_abs / max(scale, SCALE_FLOOR), int(np.shape(residuals)[-1]))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ErrorNorms:
    max: float
    mean: float


def fd_weights(offsets, deriv: int, target: float = 0.0) -> np.ndarray:
    """Finite-difference weights for the ``deriv``-th derivative at ``target``.

    Offsets and target are in units of the step; divide the weighted sum by
    h**deriv. Solves the moment (Vandermonde) conditions directly.
    """
    z = np.asarray(offsets, dtype=float) - target
    m = len(z)
    if deriv >= m:
        raise VerificationError("need more nodes than the derivative order")
    A = np.vander(z, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[deriv] = math.factorial(deriv)
    return np.linalg.solve(A, rhs)


@lru_cache(maxsize=None)
def _central(deriv: int, half_width: int) -> tuple[np.ndarray, np.ndarray]:
    offs = np.arange(-half_width, half_width + 1)
    return offs, fd_weights(offs, deriv)


# 4th-order central stencils
D1 = _central(1, 2)
D2 = _central(2, 2)
D4 = _central(4, 3)


def fold_even(vals, w, axis=-1):
    """Even-order central stencil as sum_i w_i (v_i + v_-i - 2 v_0), i > 0.

    The centre weight never enters, so the result is exact (zero) on data
    that is affine along the stencil.
    """
    v = np.moveaxis(vals, axis, -1)
    m = len(w) // 2
    pairs = v[..., m + 1:] + v[..., m - 1::-1] - 2 * v[..., m:m + 1]
    return pairs @ w[m + 1:]


def fold_odd(vals, w, axis=-1):
    """Odd-order central stencil as sum_i w_i (v_i - v_-i), i > 0."""
    v = np.moveaxis(vals, axis, -1)
    m = len(w) // 2
    return (v[..., m + 1:] - v[..., m - 1::-1]) @ w[m + 1:]


class _Stencil:
    """Collects integer (space..., time) offsets and evaluates them in one batch."""

    def __init__(self, n: int):
        self.n = n
        self.index: dict[tuple, int] = {}

    def add(self, space=None, dt=0) -> int:
        key = tuple(space if space is not None else (0,) * self.n) + (dt,)
        return self.index.setdefault(key, len(self.index))

    def axis(self, p, i, dt=0):
        v = [0] * self.n
        v[p] = int(i)
        return self.add(v, int(dt))

    def plane(self, p, i, q, j):
        v = [0] * self.n
        v[p] += int(i)
        v[q] += int(j)
        return self.add(v, 0)

    def evaluate(self, u, xs, ts, h):
        offs = np.array(list(self.index), dtype=float)
        P, S = len(ts), len(offs)
        px = (xs[:, None, :] + h * offs[None, :, :self.n]).reshape(-1, self.n)
        pt = (ts[:, None] + h * offs[None, :, self.n]).reshape(-1)
        return np.asarray(u(px, pt), dtype=float).reshape(P, S)


def _probes(u_n, probes):
    xs, ts = probes
    xs = np.asarray(xs, dtype=float)
    if u_n == 1 and xs.ndim == 1:
        xs = xs[:, None]
    xs = np.atleast_2d(xs)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if xs.shape[1] != u_n or xs.shape[0] != ts.shape[0]:
        raise FieldError("probe points do not match the evaluator's dimension")
    return xs, ts


def biwave_residual(u: SolutionEvaluator, probes, h: float = 1e-2) -> ResidualReport:
    """u_tttt - (a^2+b^2) Lap u_tt + a^2 b^2 Lap^2 u at each probe (x, t).

    All pieces are 4th-order central differences: the 7-point fourth
    derivative in t and along each axis, the 5-point second derivative, the
    Laplacian applied at each of the five time levels of u_tt, and 5x5 tensor
    stencils for the mixed terms of Lap^2. Stencils are applied in folded
    form, so affine data gives exact zeros. Scale is max |u_tttt| over probes.
    """
    n = u.n
    xs, ts = _probes(n, probes)
    if np.any(ts < 4 * h):
        raise VerificationError(f"probes need t >= 4h = {4 * h}")
    a2, b2 = u.params.a ** 2, u.params.b ** 2
    st = _Stencil(n)
    st.add()
    o2, w2 = D2
    o4, w4 = D4
    i_t4 = [st.add(dt=int(j)) for j in o4]
    i_lap = {int(j): [[st.axis(p, i, j) for i in o2] for p in range(n)] for j in o2}
    i_ax4 = [[st.axis(p, i) for i in o4] for p in range(n)]
    i_mix = {(p, q): [[st.plane(p, i, q, j) for j in o2] for i in o2]
             for p in range(n) for q in range(p + 1, n)}

    U = st.evaluate(u, xs, ts, h)

    d4t = fold_even(U[:, i_t4], w4) / h ** 4

    def lap(j):
        return sum(fold_even(U[:, idx], w2) for idx in i_lap[j]) / h ** 2

    d2t_lap = fold_even(np.stack([lap(int(j)) for j in o2], axis=-1), w2) / h ** 2
    bilap = sum(fold_even(U[:, idx], w4) for idx in i_ax4) / h ** 4
    for grid in i_mix.values():
        bilap = bilap + 2 * fold_even(fold_even(U[:, np.array(grid)], w2), w2) / h ** 4

    res = d4t - (a2 + b2) * d2t_lap + a2 * b2 * bilap
    return ResidualReport.from_residuals(res, d4t)


def compare(u1: SolutionEvaluator, u2: SolutionEvaluator, grid: EvalGrid) -> ErrorNorms:
    if u1.n != u2.n or grid.n != u1.n:
        raise FieldError(f"dimension mismatch: {u1.n}, {u2.n}, grid {grid.n}")
    xs, ts = grid.points()
    err = np.abs(u1(xs, ts) - u2(xs, ts))
    return ErrorNorms(float(np.max(err)), float(np.mean(err)))


def initial_probe(u: SolutionEvaluator, data: InitialData, k: int, eps: float, points,
                  step: float | None = None) -> float:
    """Max |d^k u/dt^k (x, 0+) - phi_k(x)| over ``points``.

    The derivative is a one-sided difference on the k+4 samples
    t = eps, eps + step, ..., extrapolated to t = 0 (4th-order accurate).
    ``step`` defaults to max(eps, 1e-2).
    """
    if k not in (0, 1, 2, 3):
        raise ValueError("k must be 0, 1, 2 or 3")
    step = step or max(eps, 1e-2)
    xs = np.asarray(points, dtype=float)
    if u.n == 1 and xs.ndim == 1:
        xs = xs[:, None]
    xs = np.atleast_2d(xs)
    nodes = eps / step + np.arange(k + 4)
    w = fd_weights(nodes, k, target=0.0) / step ** k
    P = len(xs)
    px = np.repeat(xs, len(nodes), axis=0)
    pt = np.tile(eps + step * np.arange(k + 4), P)
    U = np.asarray(u(px, pt)).reshape(P, len(nodes))
    est = U @ w
    return float(np.max(np.abs(est - data.fields[k](xs))))
