import math

import numpy as np
import pytest

from biwave import (EvalGrid, InitialData, SolutionEvaluator, TrigPoly, biwave_residual, compare,
                    initial_probe, make_params, oracle_solution, solve_1d)
from biwave.fields import FieldError
from biwave.verification import VerificationError, fd_weights

P1 = make_params(2, 1, 1)
P2 = make_params(2, 1, 2)


def ev(fn, params=P1):
    return SolutionEvaluator(fn, params, "derived")


def test_fd_weights_known_stencils():
    np.testing.assert_allclose(fd_weights([-1, 0, 1], 2), [1, -2, 1], atol=1e-14)
    np.testing.assert_allclose(fd_weights([-2, -1, 0, 1, 2], 1), np.array([1, -8, 0, 8, -1]) / 12, atol=1e-14)
    with pytest.raises(VerificationError):
        fd_weights([0, 1], 2)


def test_residual_of_constant():
    u = ev(lambda xs, ts: np.full(len(ts), 3.0), P2)
    rep = biwave_residual(u, (np.zeros((3, 2)), np.array([0.5, 1.0, 2.0])))
    assert rep.max_abs <= 1e-10 and rep.probes == 3


def test_residual_of_plane_wave():
    a = P1.a
    u = ev(lambda xs, ts: np.cos(xs[:, 0] - a * ts))
    x = np.linspace(-2, 2, 9)
    assert biwave_residual(u, (x, np.full(9, 1.0))).relative < 1e-6


def test_residual_of_bilinear():
    # dyadic step and probes keep every stencil sample exact
    u = ev(lambda xs, ts: ts * xs[:, 0], P2)
    xs = np.array([[0.5, 0.25], [-1.0, 2.0]])
    rep = biwave_residual(u, (xs, np.array([0.5, 1.0])), h=1 / 128)
    assert rep.max_abs <= 1e-9


def test_residual_requires_clearance_from_t0():
    u = ev(lambda xs, ts: ts)
    with pytest.raises(VerificationError):
        biwave_residual(u, (np.zeros(1), np.array([0.02])), h=1e-2)


def test_residual_of_solver_output():
    data = InitialData.of(1, phi1=TrigPoly.sin([1]), phi2=TrigPoly.cos([1]))
    u = solve_1d(data, P1)
    rep = biwave_residual(u, (np.linspace(-3, 3, 7), np.full(7, 1.0)))
    assert rep.relative < 1e-3


def test_residual_convergence_order():
    # cos(x) cos(3t): the operator gives (81 - 9(a^2+b^2) + a^2 b^2) cos(x) cos(3t)
    a2, b2 = P1.a ** 2, P1.b ** 2
    u = ev(lambda xs, ts: np.cos(xs[:, 0]) * np.cos(3 * ts))
    x, t = 0.3, 1.1
    exact = (81 - 9 * (a2 + b2) + a2 * b2) * math.cos(x) * math.cos(3 * t)
    hs = [0.1, 0.05, 0.025]
    errs = []
    for h in hs:
        st = biwave_residual(u, (np.array([x]), np.array([t])), h=h)
        # single probe: max_abs is |res|; recover the signed value
        errs.append(abs(st.max_abs - abs(exact)))
    orders = [math.log2(e1 / e2) for e1, e2 in zip(errs, errs[1:])]
    assert min(orders) >= 3.5


def test_compare_examples():
    grid = EvalGrid(((-math.pi, math.pi),), 11, (0.5, 1.0, 2.0))
    u1 = ev(lambda xs, ts: np.sin(xs[:, 0]) * ts)
    u2 = ev(lambda xs, ts: np.sin(xs[:, 0]) * ts + 0.5)
    z = compare(u1, u1, grid)
    assert z.max == 0 and z.mean == 0
    d = compare(u1, u2, grid)
    assert d.max == pytest.approx(0.5) and d.mean == pytest.approx(0.5)
    assert compare(u2, u1, grid) == d
    with pytest.raises(FieldError):
        compare(u1, ev(lambda xs, ts: ts, P2), grid)


def test_compare_worked_example_solver_vs_oracle():
    data = InitialData.of(1, phi1=TrigPoly.sin([1]), phi2=TrigPoly.cos([1]))
    p = make_params(1, 0.5, 1)
    grid = EvalGrid(((-math.pi, math.pi),), 41, (0.5, 1.0, 2.0))
    assert compare(solve_1d(data, p), oracle_solution(data, p), grid).max <= 1e-6


def test_initial_probe_examples():
    data = InitialData.of(1, phi0=TrigPoly.cos([1]), phi1=TrigPoly.sin([2]), phi3=TrigPoly.cos([1], 0.3))
    pts = np.linspace(-2, 2, 5)
    assert initial_probe(oracle_solution(data, P1), data, 0, 1e-5, pts) < 1e-8
    worked = InitialData.of(1, phi1=TrigPoly.sin([1]), phi2=TrigPoly.cos([1]))
    u = solve_1d(worked, make_params(1, 0.5, 1))
    assert initial_probe(u, worked, 1, 1e-2, pts) < 1e-3
    zero = solve_1d(InitialData.zero(1), P1)
    for k in range(4):
        assert initial_probe(zero, InitialData.zero(1), k, 1e-3, pts) <= 1e-10
    with pytest.raises(ValueError):
        initial_probe(zero, InitialData.zero(1), 4, 1e-3, pts)
