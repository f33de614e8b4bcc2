"""Forced problem: u = u_hom + int_0^t w(x, t, tau) dtau.

w(., ., tau) is the homogeneous solution launched at time tau with data
(0, 0, 0, f(., tau)); the equation is autonomous, so it is the ordinary
homogeneous solver evaluated at elapsed time t - tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import BiwaveParams, FieldError, ForcingField, InitialData, SolutionEvaluator
from .quadrature import gauss_legendre
from .solvers import SolverConfig, solve

__all__ = ["DuhamelConfig", "solve_nonhomogeneous", "tau_order_for"]


@dataclass(frozen=True)
class DuhamelConfig:
    tau_order: int | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.tau_order is not None and self.tau_order < 4:
            raise ValueError("tau_order must be >= 4")


def tau_order_for(t: float, cfg: DuhamelConfig) -> int:
    return cfg.tau_order or max(16, math.ceil(8 * t))


def solve_nonhomogeneous(data: InitialData, f: ForcingField, params: BiwaveParams,
                         cfg: DuhamelConfig = DuhamelConfig()) -> SolutionEvaluator:
    if f.n != params.n or data.n != params.n:
        raise FieldError(f"dimension mismatch: data n={data.n}, forcing n={f.n}, params n={params.n}")
    hom = solve(data, params, cfg.solver)
    if f.is_zero:
        return SolutionEvaluator(hom.fn, params, "duhamel")

    def launched(tau):
        return solve(InitialData.of(params.n, phi3=f.at(tau)), params, cfg.solver)

    def forced(x, t):
        if t == 0:
            return 0.0
        rule = gauss_legendre(tau_order_for(t, cfg))
        taus = 0.5 * t * (rule.nodes + 1)
        total = 0.0
        for tau, w in zip(taus, rule.weights):
            total += w * launched(tau).fn(x[None, :], np.array([t - tau]))[0]
        return 0.5 * t * total

    def fn(xs, ts):
        out = hom.fn(xs, ts)
        return out + np.array([forced(x, float(t)) for x, t in zip(xs, ts)])

    return SolutionEvaluator(fn, params, "duhamel")
