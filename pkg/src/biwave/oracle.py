"""Per-Fourier-mode ground truth for trig-poly data.

Each mode exp(i k.x) evolves independently; its amplitude solves
u'''' + (a^2+b^2)|k|^2 u'' + a^2 b^2 |k|^4 u = g(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .fields import (BiwaveParams, FieldError, InitialData, SolutionEvaluator, TrigForcing,
                     TrigPoly, ZeroField)

__all__ = [
    "OracleError",
    "ModeCoefficients",
    "mode_coefficients",
    "closed_form_coefficients",
    "zero_mode",
    "mode_amplitude",
    "oracle_solution",
    "forced_mode_solution",
    "forced_oracle_solution",
    "spectral_data",
]


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class ModeCoefficients:
    """u(t) = C1 cos(a|k|t) + C2 sin(a|k|t) + C3 cos(b|k|t) + C4 sin(b|k|t)."""

    C1: complex
    C2: complex
    C3: complex
    C4: complex
    k: tuple
    freq: float

    def __call__(self, t, params: BiwaveParams):
        a, b, w = params.a, params.b, self.freq
        t = np.asarray(t, dtype=float)
        return (self.C1 * np.cos(a * w * t) + self.C2 * np.sin(a * w * t)
                + self.C3 * np.cos(b * w * t) + self.C4 * np.sin(b * w * t))


def _system(freq, params):
    a, b, w = params.a, params.b, freq
    return np.array([
        [1, 0, 1, 0],
        [0, a * w, 0, b * w],
        [-a * a * w * w, 0, -b * b * w * w, 0],
        [0, -a ** 3 * w ** 3, 0, -b ** 3 * w ** 3],
    ], dtype=float)


def closed_form_coefficients(freq: float, specdata, params: BiwaveParams):
    """C1..C4 from the explicit inversion of the initial-value system."""
    a, b, w = params.a, params.b, freq
    p0, p1, p2, p3 = (complex(v) for v in specdata)
    gap = a * a - b * b
    return (
        -(b * b * w * w * p0 + p2) / (gap * w * w),
        -(b * b * w * w * p1 + p3) / ((a ** 3 - a * b * b) * w ** 3),
        (a * a * w * w * p0 + p2) / (gap * w * w),
        (a * a * w * w * p1 + p3) / ((a * a * b - b ** 3) * w ** 3),
    )


def mode_coefficients(k, specdata, params: BiwaveParams, *, tol: float = 1e-10) -> ModeCoefficients:
    """Solve the 4x4 initial-value system and cross-check the closed form."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    freq = float(np.sqrt(k @ k))
    if freq == 0:
        raise OracleError("zero wavevector: use zero_mode")
    rhs = np.asarray(specdata, dtype=complex)
    A = _system(freq, params)
    C = np.linalg.solve(A, rhs.real) + 1j * np.linalg.solve(A, rhs.imag)
    closed = np.array(closed_form_coefficients(freq, rhs, params))
    scale = max(1.0, float(np.max(np.abs(closed))))
    if np.max(np.abs(C - closed)) > tol * scale:
        raise OracleError(f"linear solve and closed form disagree at |k|={freq}: {C} vs {closed}")
    return ModeCoefficients(*(complex(c) for c in C), k=tuple(k.tolist()), freq=freq)


def zero_mode(specdata, t):
    p0, p1, p2, p3 = specdata
    t = np.asarray(t, dtype=float)
    return p0 + p1 * t + p2 * t ** 2 / 2 + p3 * t ** 3 / 6


def _trig(f, n):
    if isinstance(f, ZeroField):
        return {}
    if not isinstance(f, TrigPoly):
        raise FieldError(f"oracle needs trig-poly data, got a {f.kind} field")
    if f.n != n:
        raise FieldError("dimension mismatch")
    return f


def spectral_data(data: InitialData):
    """Map wavevector -> (phi0^, phi1^, phi2^, phi3^) over the union of modes."""
    fields = [_trig(f, data.n) for f in data.fields]
    bases = {f.base_frequency for f in fields if isinstance(f, TrigPoly) and not f.is_zero}
    if len(bases) > 1:
        raise FieldError("data fields use different base frequencies")
    base = bases.pop() if bases else 1.0
    spec: dict[tuple, list[complex]] = {}
    for j, f in enumerate(fields):
        modes = f.modes if isinstance(f, TrigPoly) else {}
        for kv, c in modes.items():
            spec.setdefault(kv, [0j, 0j, 0j, 0j])[j] += c
    return spec, base


def mode_amplitude(kvec, specdata, params, t):
    """Time factor of one mode: closed form for k != 0, cubic for k = 0."""
    if not np.any(kvec):
        return zero_mode(specdata, t)
    return mode_coefficients(kvec, specdata, params)(t, params)


def oracle_solution(data: InitialData, params: BiwaveParams, *, imag_tol: float = 1e-10) -> SolutionEvaluator:
    if data.n != params.n:
        raise FieldError("data and params disagree on dimension")
    spec, base = spectral_data(data)
    modes = []
    for kv, sd in sorted(spec.items()):
        kvec = np.asarray(kv, dtype=float) * base
        coeffs = None if not np.any(kvec) else mode_coefficients(kvec, sd, params)
        modes.append((kvec, sd, coeffs))

    def fn(xs, ts):
        total = np.zeros(len(ts), dtype=complex)
        for kvec, sd, coeffs in modes:
            amp = zero_mode(sd, ts) if coeffs is None else coeffs(ts, params)
            total += amp * np.exp(1j * (xs @ kvec))
        scale = 1.0 + np.max(np.abs(total), initial=0.0)
        if np.max(np.abs(total.imag), initial=0.0) > imag_tol * scale:
            raise OracleError("oracle output has a non-negligible imaginary part")
        return total.real

    return SolutionEvaluator(fn, params, "oracle")


def forced_mode_solution(k, g, specdata, params: BiwaveParams, t: float, *, rtol: float = 1e-11,
                         atol: float = 1e-13) -> complex:
    """Integrate the forced mode ODE from 0 to t with adaptive 8th-order steps."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    w2 = float(k @ k)
    c2 = (params.a ** 2 + params.b ** 2) * w2
    c0 = params.a ** 2 * params.b ** 2 * w2 * w2
    y0 = np.asarray(specdata, dtype=complex)
    if t == 0:
        return complex(y0[0])

    def rhs(s, y):
        return np.array([y[1], y[2], y[3], g(s) - c2 * y[2] - c0 * y[0]], dtype=complex)

    sol = solve_ivp(rhs, (0.0, float(t)), y0, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise OracleError(f"mode integration failed: {sol.message}")
    return complex(sol.y[0, -1])


def forced_oracle_solution(data: InitialData, forcing: TrigForcing, params: BiwaveParams, *,
                           rtol: float = 1e-11) -> SolutionEvaluator:
    """Homogeneous oracle plus per-mode integration of each forcing term.

    Forcing modes are integrated from zero data; the response is cached per
    (term, mode, t).
    """
    hom = oracle_solution(data, params)
    terms = []
    for pattern, g in forcing.terms:
        for kv, c in pattern.modes.items():
            terms.append((pattern.wavevector(kv), c, g))
    cache: dict = {}

    def response(j, t):
        key = (j, float(t))
        if key not in cache:
            kvec, c, g = terms[j]
            cache[key] = c * forced_mode_solution(kvec, g, (0, 0, 0, 0), params, t, rtol=rtol)
        return cache[key]

    def fn(xs, ts):
        out = hom.fn(xs, ts).astype(complex)
        for j, (kvec, _, _) in enumerate(terms):
            amp = np.array([response(j, t) for t in ts])
            out += amp * np.exp(1j * (xs @ kvec))
        return out.real

    return SolutionEvaluator(fn, params, "oracle")
