"""Closed-form solvers for the homogeneous biwave Cauchy problem.

Three evaluators share one contract: given Cauchy data and speeds they
return a :class:`SolutionEvaluator` for u(x, t), t >= 0.

* :func:`solve_1d` - iterated integrals of the data over light-cone intervals.
* :func:`solve_odd` - spherical means, odd n in 3..7.
* :func:`solve_even` - modified spherical means (descent from n+1), even n in 2..6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fields import (BiwaveParams, FieldError, InitialData, ScalarField, SolutionEvaluator,
                     TrigPoly, ZeroField)
from .quadrature import (integrate_interval, integrate_nested, sphere_surface_rule,
                         weighted_ball_rule)
from .spherical import mean_profile, radial_derivative_power, time_derivative

__all__ = [
    "SolverConfig",
    "SolverError",
    "solve_1d",
    "solve_odd",
    "solve_even",
    "solve",
    "taylor_proxy",
    "pure_speed_projection_check",
    "double_factorial",
    "DEFAULT_SPHERE_LEVEL",
    "DEFAULT_BALL_LEVEL",
]

# Per-dimension defaults: n=3 gets 32 x 64 angular nodes; higher dimensions
# trade nodes per axis for a bounded total node count.
DEFAULT_SPHERE_LEVEL = {3: 32, 5: 8, 7: 5}
DEFAULT_BALL_LEVEL = {2: 32, 4: 8, 6: 5}

# points per vectorized chunk in the 1D solver (32^3 inner nodes each)
_CHUNK_1D = 32


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    quad_order: int = 32
    sphere_level: int | None = None
    h_rel: float = 1e-3
    t_eps: float = 1e-6

    def __post_init__(self):
        if self.quad_order < 1:
            raise ValueError("quad_order must be positive")
        if self.sphere_level is not None and self.sphere_level < 1:
            raise ValueError("sphere_level must be positive")
        if not self.h_rel > 0:
            raise ValueError("h_rel must be positive")
        if not 0 < self.t_eps < 1e-3:
            raise ValueError("t_eps must lie in (0, 1e-3)")

    def with_overrides(self, **kw) -> SolverConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2))


def taylor_proxy(data: InitialData, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """phi0 + t phi1 + t^2/2 phi2 + t^3/6 phi3, used below the small-time cutoff."""
    out = np.zeros(len(t))
    for k, f in enumerate(data.fields):
        if not f.is_zero:
            out += t ** k / math.factorial(k) * f._eval(x)
    return out


def _check(data: InitialData, params: BiwaveParams):
    if data.n != params.n:
        raise SolverError(f"data dimension {data.n} != params dimension {params.n}")


def solve_1d(data: InitialData, params: BiwaveParams, cfg: SolverConfig = SolverConfig()) -> SolutionEvaluator:
    if params.n != 1:
        raise SolverError(f"solve_1d needs n = 1, got n = {params.n}")
    _check(data, params)
    a, b = params.a, params.b
    pref = 1.0 / (2 * a * b * params.gap)
    order = cfg.quad_order
    phi0, phi1, phi2, phi3 = data.fields

    def line(f: ScalarField):
        return lambda y: f._eval(y[..., None])

    def chunk(x, t):
        acc = np.zeros_like(x)
        if not phi0.is_zero:
            f = line(phi0)
            acc += -a * b ** 3 * (f(x + a * t) + f(x - a * t)) + a ** 3 * b * (f(x + b * t) + f(x - b * t))
        if not phi1.is_zero:
            f = line(phi1)
            acc += (-b ** 3 * integrate_interval(f, x - a * t, x + a * t, order)
                    + a ** 3 * integrate_interval(f, x - b * t, x + b * t, order))
        if not phi2.is_zero:
            f = line(phi2)
            inner = (0.0, lambda y: y)
            acc += a * b * (-integrate_nested(f, 2, [(x - a * t, x - b * t), inner], order)
                            + integrate_nested(f, 2, [(x + b * t, x + a * t), inner], order))
        if not phi3.is_zero:
            f = line(phi3)
            inner = [(0.0, lambda y: y), (0.0, lambda tau: tau)]
            acc += (b * integrate_nested(f, 3, [(x - a * t, x + a * t)] + inner, order)
                    - a * integrate_nested(f, 3, [(x - b * t, x + b * t)] + inner, order))
        return pref * acc

    def fn(xs, ts):
        x = xs[:, 0]
        out = np.empty(len(ts))
        small = ts < cfg.t_eps
        out[small] = taylor_proxy(data, xs[small], ts[small])
        idx = np.flatnonzero(~small)
        for i in range(0, len(idx), _CHUNK_1D):
            sel = idx[i:i + _CHUNK_1D]
            out[sel] = chunk(x[sel], ts[sel])
        return out

    return SolutionEvaluator(fn, params, "solver-1d")


def _mean_solver(data, params, cfg, rule, power, m, norm, provenance):
    """Shared assembly for the odd (sphere) and even (weighted ball) formulas.

    With P(s) = ((1/s) d/ds)^m (s^power mean_s(phi)(x)), and noting that
    (1/(c^2 t) d/dt)^m acting on t -> (ct)^power mean_ct equals P(ct):

        u = [ (a^2/b) d/dt P0(bt) - (b^2/a) d/dt P0(at)
            + (a^2/b) P1(bt)      - (b^2/a) P1(at)
            + int_bt^at P2(s) ds
            + int_0^t int_{b nu}^{a nu} P3(s) ds dnu ] / (norm (a^2 - b^2))

    The phi3 term carries the same + sign in both parities: the even formula
    is the odd one in n+1 dimensions, and the spectral oracle confirms it.
    """
    a, b = params.a, params.b
    pref = 1.0 / (norm * params.gap)
    h_rel, order = cfg.h_rel, cfg.quad_order
    phi0, phi1, phi2, phi3 = data.fields

    def profile(phi, x):
        g = mean_profile(phi, x, rule, power)
        return lambda s: radial_derivative_power(g, m, s, h_rel)

    def point(x, t):
        acc = 0.0
        if not phi0.is_zero:
            P = profile(phi0, x)
            acc += (a * a / b * time_derivative(lambda tt: P(b * tt), t, h_rel)
                    - b * b / a * time_derivative(lambda tt: P(a * tt), t, h_rel))
        if not phi1.is_zero:
            P = profile(phi1, x)
            vals = P(np.array([b * t, a * t]))
            acc += a * a / b * vals[0] - b * b / a * vals[1]
        if not phi2.is_zero:
            acc += integrate_interval(profile(phi2, x), b * t, a * t, order)
        if not phi3.is_zero:
            P = profile(phi3, x)
            # Fubini over {0 <= nu <= t, b nu <= s <= a nu}: the s-slice has
            # length s(1/b - 1/a) below s = bt and t - s/a above it
            acc += integrate_interval(lambda s: P(s) * s * (1 / b - 1 / a), 0.0, b * t, order)
            acc += integrate_interval(lambda s: P(s) * (t - s / a), b * t, a * t, order)
        return pref * acc

    def fn(xs, ts):
        out = np.empty(len(ts))
        for i, (x, t) in enumerate(zip(xs, ts)):
            if t < cfg.t_eps:
                out[i] = taylor_proxy(data, x[None, :], np.array([t]))[0]
            else:
                out[i] = point(x, float(t))
        return out

    return SolutionEvaluator(fn, params, provenance)


def solve_odd(data: InitialData, params: BiwaveParams, cfg: SolverConfig = SolverConfig()) -> SolutionEvaluator:
    n = params.n
    if n % 2 == 0:
        raise SolverError(f"solve_odd needs odd n, got {n}")
    if n not in DEFAULT_SPHERE_LEVEL:
        raise SolverError(f"solve_odd supports n in {sorted(DEFAULT_SPHERE_LEVEL)}, got {n}")
    _check(data, params)
    rule = sphere_surface_rule(n, cfg.sphere_level or DEFAULT_SPHERE_LEVEL[n])
    return _mean_solver(data, params, cfg, rule, n - 2, (n - 3) // 2, double_factorial(n - 2),
                        "solver-odd")


def solve_even(data: InitialData, params: BiwaveParams, cfg: SolverConfig = SolverConfig()) -> SolutionEvaluator:
    n = params.n
    if n % 2 == 1:
        raise SolverError(f"solve_even needs even n, got {n}")
    if n not in DEFAULT_BALL_LEVEL:
        raise SolverError(f"solve_even supports n in {sorted(DEFAULT_BALL_LEVEL)}, got {n}")
    _check(data, params)
    rule = weighted_ball_rule(n, cfg.sphere_level or DEFAULT_BALL_LEVEL[n])
    return _mean_solver(data, params, cfg, rule, n - 1, (n - 2) // 2, double_factorial(n - 1),
                        "solver-even")


def solve(data: InitialData, params: BiwaveParams, cfg: SolverConfig = SolverConfig()) -> SolutionEvaluator:
    """Dispatch to the solver matching the dimension."""
    if params.n == 1:
        return solve_1d(data, params, cfg)
    if params.n % 2:
        return solve_odd(data, params, cfg)
    return solve_even(data, params, cfg)


def pure_speed_projection_check(params: BiwaveParams, phi0: ScalarField, phi1: ScalarField) -> InitialData:
    """Data (phi0, phi1, a^2 Lap phi0, a^2 Lap phi1): every mode travels at speed a only."""

    def lap(f):
        if isinstance(f, ZeroField):
            return f
        if not isinstance(f, TrigPoly):
            raise FieldError(f"pure-speed data needs trig-poly fields, got {f.kind}")
        return f.map_modes(lambda k, c: -params.a ** 2 * float(k @ k) * c)

    return InitialData(phi0, phi1, lap(phi0), lap(phi1))
