import math

import numpy as np
import pytest

from biwave import (ElasticParams, InitialData, ParamError, SolverConfig, TrigPoly, VectorFieldEvaluator,
                    cks_displacement, lame_to_speeds, make_params, navier_residual, oracle_solution, solve)
from biwave.elastokit import memoized
from biwave.fields import ClosureForcing, FieldError

PROBES = (np.array([[0.1, 0.2, 0.3], [0.5, -0.2, 0.1], [-0.4, 0.3, 0.0]]), np.array([1.0, 1.25, 1.5]))


def test_lame_to_speeds_examples():
    p = lame_to_speeds(ElasticParams(0.0, 1.0, 1.0))
    assert p.a == pytest.approx(math.sqrt(2)) and p.b == 1.0
    p = lame_to_speeds(ElasticParams(2.0, 1.0, 4.0))
    assert (p.a, p.b) == (1.0, 0.5)
    with pytest.raises(ParamError) as exc:
        ElasticParams(-1.0, 0.4, 1.0)
    assert exc.value.code == "ordering"


@pytest.mark.parametrize("args, code", [((1.0, 0.0, 1.0), "shear-modulus"), ((1.0, 1.0, 0.0), "density"),
                                        ((math.nan, 1.0, 1.0), "non-finite")])
def test_elastic_param_codes(args, code):
    with pytest.raises(ParamError) as exc:
        ElasticParams(*args)
    assert exc.value.code == code


def test_speed_gap_round_trip(rng):
    for _ in range(20):
        lam, mu, rho = rng.uniform(-0.5, 3), rng.uniform(0.6, 2), rng.uniform(0.5, 4)
        p = lame_to_speeds(ElasticParams(lam, mu, rho))
        assert p.gap == pytest.approx((lam + mu) / rho, abs=1e-12)


def zero_vec(n):
    return VectorFieldEvaluator([lambda xs, ts: np.zeros(len(ts))] * n, n)


def test_cks_of_zero_potential():
    u = cks_displacement(zero_vec(3), make_params(2, 1, 3))
    np.testing.assert_array_equal(u(*PROBES), 0.0)


def test_cks_of_plane_wave():
    p = make_params(2, 1, 3)
    w = VectorFieldEvaluator([lambda xs, ts: np.cos(xs[:, 0] - p.a * ts),
                              lambda xs, ts: np.zeros(len(ts)), lambda xs, ts: np.zeros(len(ts))], 3)
    u = cks_displacement(w, p)(*PROBES)
    expect = -p.gap * np.cos(PROBES[0][:, 0] - p.a * PROBES[1])
    np.testing.assert_allclose(u[:, 0], expect, atol=1e-6)
    np.testing.assert_allclose(u[:, 1:], 0.0, atol=1e-10)


def test_cks_of_time_only_potential():
    w = VectorFieldEvaluator([lambda xs, ts, c=c: np.sin((c + 1) * ts) for c in range(3)], 3)
    u = cks_displacement(w, make_params(2, 1, 3))(*PROBES)
    expect = np.stack([-((c + 1) ** 2) * np.sin((c + 1) * PROBES[1]) for c in range(3)], axis=-1)
    np.testing.assert_allclose(u, expect, atol=1e-6)


def test_navier_residual_trivial_fields():
    ep = ElasticParams(2.0, 1.0, 1.0)
    assert navier_residual(zero_vec(3), None, ep, PROBES).max_abs <= 1e-12
    rigid = VectorFieldEvaluator([lambda xs, ts, c=c: np.full(len(ts), 0.3 * c - 1) for c in range(3)], 3)
    assert navier_residual(rigid, None, ep, PROBES).max_abs <= 1e-10


def test_navier_residual_with_forcing():
    # u = (t^2/2, 0) solves the Navier equation with f = rho (1, 0)
    ep = ElasticParams(1.0, 1.0, 2.0)
    u = VectorFieldEvaluator([lambda xs, ts: ts ** 2 / 2, lambda xs, ts: np.zeros(len(ts))], 2)
    f = [ClosureForcing(lambda x, t: np.full(x.shape[:-1], 2.0), 2),
         ClosureForcing(lambda x, t: np.zeros(x.shape[:-1]), 2)]
    probes = (np.array([[0.0, 0.0], [1.0, 0.5]]), np.array([1.0, 2.0]))
    assert navier_residual(u, f, ep, probes).max_abs <= 1e-9
    assert navier_residual(u, None, ep, probes).max_abs == pytest.approx(1.0)
    with pytest.raises(FieldError):
        navier_residual(u, f[:1], ep, probes)


@pytest.mark.parametrize("source", ["oracle", "solver"])
def test_cks_identity_from_biwave_potentials(source):
    ep = ElasticParams(2.0, 1.0, 1.0)
    p = lame_to_speeds(ep, 3)
    data = [InitialData.of(3, phi0=TrigPoly.cos([1, 0, 1])), InitialData.of(3, phi1=TrigPoly.sin([0, 1, 1])),
            InitialData.of(3, phi2=TrigPoly.cos([1, 1, 0], 0.5))]
    make = (lambda d: oracle_solution(d, p)) if source == "oracle" else \
        (lambda d: solve(d, p, SolverConfig(sphere_level=16)))
    w = VectorFieldEvaluator([memoized(make(d).fn) for d in data], 3)
    u = cks_displacement(w, p, h=2e-2)
    probes = (PROBES[0][:2], PROBES[1][:2])
    assert navier_residual(u, None, ep, probes, h=2e-2).relative < 1e-2


def test_memoized_dedupes_rounded_points():
    calls = []

    def fn(xs, ts):
        calls.append(len(ts))
        return xs[:, 0] + ts

    m = memoized(fn)
    xs = np.array([[0.1], [0.1 + 1e-15], [0.2]])
    np.testing.assert_allclose(m(xs, np.zeros(3)), [0.1, 0.1, 0.2])
    m(xs, np.zeros(3))
    assert calls == [2]


def test_vector_field_needs_all_components():
    with pytest.raises(FieldError):
        VectorFieldEvaluator([lambda xs, ts: ts], 2)
