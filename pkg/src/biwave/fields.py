"""Core domain types: wave-speed parameters, scalar fields, Cauchy data, grids.

Scalar fields are vectorized: calling a field with an array of shape
``(..., n)`` returns an array of shape ``(...)``. Every type here is
immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ParamError",
    "FieldError",
    "BiwaveParams",
    "make_params",
    "ScalarField",
    "TrigPoly",
    "Gaussian",
    "ClosureField",
    "ZeroField",
    "SumField",
    "eval_field",
    "InitialData",
    "ForcingField",
    "TrigForcing",
    "ClosureForcing",
    "SolutionEvaluator",
    "EvalGrid",
]


class ParamError(ValueError):
    """Invalid biwave parameters; ``code`` names the violated constraint."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class BiwaveParams:
    a: float
    b: float
    n: int

    def __post_init__(self):
        _validate_params(self.a, self.b, self.n)

    @property
    def gap(self) -> float:
        """a^2 - b^2, the denominator shared by all the solution formulas."""
        return self.a * self.a - self.b * self.b


def _validate_params(a, b, n):
    for name, v in (("a", a), ("b", b)):
        if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
            raise ParamError("non-finite", f"{name}={v!r} is not a finite real")
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ParamError("dimension", f"n={n!r} is not an integer")
    if n < 1:
        raise ParamError("dimension", f"n={n} must be >= 1")
    if a <= 0 or b <= 0:
        raise ParamError("nonpositive-speed", f"speeds must be positive, got a={a}, b={b}")
    if not math.isfinite(a * a):
        raise ParamError("non-finite", f"a^2 overflows for a={a}")
    if b * b == 0:
        raise ParamError("nonpositive-speed", f"b^2 underflows to 0 for b={b}")
    if a * a == b * b:
        raise ParamError("degenerate-speeds", f"a^2 == b^2 == {a * a}")
    if a * a < b * b:
        raise ParamError("ordering", f"need a^2 > b^2, got a={a}, b={b}")


def make_params(a: float, b: float, n: int) -> BiwaveParams:
    return BiwaveParams(float(a) if isinstance(a, (int, float)) else a,
                        float(b) if isinstance(b, (int, float)) else b, n)


def _as_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != n:
        raise FieldError(f"dimension mismatch: field has n={n}, point has {x.shape[-1]} coordinates")
    return x


class ScalarField:
    """Evaluable real function on R^n."""

    kind: str = "closure"
    n: int

    def __call__(self, x) -> np.ndarray:
        return self._eval(_as_points(x, self.n))

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __add__(self, other: ScalarField) -> ScalarField:
        if not isinstance(other, ScalarField):
            return NotImplemented
        return SumField((self, other))

    @property
    def is_zero(self) -> bool:
        return False


class ZeroField(ScalarField):
    kind = "zero"

    def __init__(self, n: int):
        self.n = n

    def _eval(self, x):
        return np.zeros(x.shape[:-1])

    @property
    def is_zero(self):
        return True

    def __add__(self, other):
        if isinstance(other, ScalarField):
            return other
        return NotImplemented

    def __mul__(self, c):
        return self

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ZeroField) and other.n == self.n

    def __hash__(self):
        return hash(("zero", self.n))

    def __repr__(self):
        return f"ZeroField(n={self.n})"


class TrigPoly(ScalarField):
    """Real trigonometric polynomial sum_k c_k exp(i w k.x), w the base frequency.

    ``wavevectors`` are integer vectors; amplitudes must be conjugate
    symmetric (c_{-k} = conj(c_k)) so that the field is real.
    """

    kind = "trig-poly"

    def __init__(self, wavevectors, amplitudes, base_frequency: float = 1.0, *, tol: float = 1e-12):
        k = np.atleast_2d(np.asarray(wavevectors, dtype=np.int64))
        c = np.asarray(amplitudes, dtype=complex).ravel()
        if k.shape[0] != c.shape[0]:
            raise FieldError("one amplitude per wavevector required")
        if not (base_frequency > 0 and math.isfinite(base_frequency)):
            raise FieldError(f"base frequency must be positive, got {base_frequency}")
        self.n = k.shape[1]
        modes: dict[tuple, complex] = {}
        for kv, cv in zip(map(tuple, k.tolist()), c):
            modes[kv] = modes.get(kv, 0j) + cv
        modes = {kv: cv for kv, cv in modes.items() if cv != 0}
        for kv, cv in modes.items():
            partner = modes.get(tuple(-v for v in kv), 0j)
            if abs(partner - np.conj(cv)) > tol * max(1.0, abs(cv)):
                raise FieldError(f"amplitudes not conjugate symmetric at k={kv}")
        self.base_frequency = float(base_frequency)
        self._modes = dict(sorted(modes.items()))
        self._fold()

    def _fold(self):
        # cos/sin form over a half spectrum: c e^{ia} + conj(c) e^{-ia} = 2Re(c) cos a - 2Im(c) sin a
        ks, alpha, beta = [], [], []
        for kv, cv in self._modes.items():
            neg = tuple(-v for v in kv)
            if kv == neg:
                ks.append(kv)
                alpha.append(cv.real)
                beta.append(0.0)
            elif kv > neg:
                ks.append(kv)
                alpha.append(2 * cv.real)
                beta.append(-2 * cv.imag)
        self._k_half = np.array(ks, dtype=float).reshape(-1, self.n) * self.base_frequency
        self._alpha = np.array(alpha)
        self._beta = np.array(beta)
        self._has_sin = bool(np.any(self._beta != 0))

    @classmethod
    def cos(cls, k, amplitude: float = 1.0, base_frequency: float = 1.0) -> TrigPoly:
        k = np.asarray(k, dtype=np.int64).ravel()
        if not k.any():
            return cls([k], [amplitude], base_frequency)
        return cls([k, -k], [amplitude / 2, amplitude / 2], base_frequency)

    @classmethod
    def sin(cls, k, amplitude: float = 1.0, base_frequency: float = 1.0) -> TrigPoly:
        k = np.asarray(k, dtype=np.int64).ravel()
        if not k.any():
            return cls([k], [0.0], base_frequency)
        return cls([k, -k], [-0.5j * amplitude, 0.5j * amplitude], base_frequency)

    @classmethod
    def constant(cls, value: float, n: int, base_frequency: float = 1.0) -> TrigPoly:
        return cls([[0] * n], [value], base_frequency)

    @property
    def modes(self) -> dict[tuple, complex]:
        """Integer wavevector -> complex amplitude (full, conjugate-symmetric spectrum)."""
        return dict(self._modes)

    @property
    def is_zero(self):
        return not self._modes

    def wavevector(self, k) -> np.ndarray:
        return np.asarray(k, dtype=float) * self.base_frequency

    def _eval(self, x):
        if not self._modes:
            return np.zeros(x.shape[:-1])
        phase = x @ self._k_half.T
        out = np.cos(phase) @ self._alpha
        if self._has_sin:
            out = out + np.sin(phase) @ self._beta
        return out

    def _phase_parts(self, x, nodes):
        """Pieces of the phase k.(x + r y) for a fixed centre and node set."""
        kx = x @ self._k_half.T
        ky = nodes @ self._k_half.T
        return kx, ky, self._alpha, (self._beta if self._has_sin else None)

    def complex_eval(self, x) -> np.ndarray:
        """Direct sum over the full spectrum; used to bound the imaginary residue."""
        x = _as_points(x, self.n)
        if not self._modes:
            return np.zeros(x.shape[:-1], dtype=complex)
        k = np.array(list(self._modes), dtype=float) * self.base_frequency
        c = np.array(list(self._modes.values()))
        return np.exp(1j * (x @ k.T)) @ c

    def _compatible(self, other: TrigPoly):
        if other.n != self.n:
            raise FieldError(f"dimension mismatch: {self.n} vs {other.n}")
        if other.base_frequency != self.base_frequency:
            raise FieldError("base frequencies differ")

    def __add__(self, other):
        if isinstance(other, ZeroField):
            return self
        if isinstance(other, TrigPoly):
            self._compatible(other)
            modes = self.modes
            for kv, cv in other._modes.items():
                modes[kv] = modes.get(kv, 0j) + cv
            return TrigPoly._from_modes(modes, self.n, self.base_frequency)
        return super().__add__(other)

    def __mul__(self, c):
        if not isinstance(c, (int, float, np.floating, np.integer)):
            return NotImplemented
        return TrigPoly._from_modes({kv: c * cv for kv, cv in self._modes.items()}, self.n,
                                    self.base_frequency)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def map_modes(self, fn: Callable[[np.ndarray, complex], complex]) -> TrigPoly:
        """Apply a per-mode multiplier; ``fn(wavevector, amplitude)``."""
        return TrigPoly._from_modes(
            {kv: fn(self.wavevector(kv), cv) for kv, cv in self._modes.items()},
            self.n, self.base_frequency)

    def shifted(self, dx) -> TrigPoly:
        """The field y -> self(y - dx)."""
        dx = np.asarray(dx, dtype=float).reshape(self.n)
        return self.map_modes(lambda k, c: c * np.exp(-1j * float(k @ dx)))

    @classmethod
    def _from_modes(cls, modes, n, base_frequency):
        if not modes:
            return cls(np.zeros((0, n), dtype=np.int64), [], base_frequency)
        return cls(list(modes), list(modes.values()), base_frequency)

    def __eq__(self, other):
        return (isinstance(other, TrigPoly) and self.n == other.n
                and self.base_frequency == other.base_frequency and self._modes == other._modes)

    def __hash__(self):
        return hash((self.n, self.base_frequency, tuple(self._modes.items())))

    def __repr__(self):
        return f"TrigPoly(n={self.n}, modes={self._modes}, base_frequency={self.base_frequency})"


class Gaussian(ScalarField):
    """amplitude * exp(-|x - center|^2 / width^2)."""

    kind = "gaussian"

    def __init__(self, center, width: float = 1.0, amplitude: float = 1.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        if not width > 0:
            raise FieldError(f"gaussian width must be positive, got {width}")
        self.n = self.center.shape[0]
        self.width = float(width)
        self.amplitude = float(amplitude)

    def _eval(self, x):
        d = x - self.center
        return self.amplitude * np.exp(-np.sum(d * d, axis=-1) / self.width ** 2)

    def __eq__(self, other):
        return (isinstance(other, Gaussian) and np.array_equal(self.center, other.center)
                and self.width == other.width and self.amplitude == other.amplitude)

    def __hash__(self):
        return hash((tuple(self.center), self.width, self.amplitude))

    def __repr__(self):
        return f"Gaussian(center={self.center.tolist()}, width={self.width}, amplitude={self.amplitude})"


class ClosureField(ScalarField):
    """Wraps a vectorized callable ``fn(points[..., n]) -> values[...]``.

    ``smoothness`` is the number of continuous derivatives the caller vouches
    for; it is informational only.
    """

    kind = "closure"

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], n: int, smoothness: int = 4):
        self.fn = fn
        self.n = n
        self.smoothness = smoothness

    def _eval(self, x):
        return np.asarray(self.fn(x), dtype=float)


class SumField(ScalarField):
    kind = "closure"

    def __init__(self, parts: Sequence[ScalarField]):
        ns = {p.n for p in parts}
        if len(ns) != 1:
            raise FieldError(f"dimension mismatch among summands: {sorted(ns)}")
        self.parts = tuple(parts)
        self.n = ns.pop()

    def _eval(self, x):
        return sum(p._eval(x) for p in self.parts)

    def __eq__(self, other):
        return isinstance(other, SumField) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)


def eval_field(f: ScalarField, x) -> float:
    """Evaluate ``f`` at a single point of R^n."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if x.ndim != 1 or x.shape[0] != f.n:
        raise FieldError(f"dimension mismatch: field has n={f.n}, point is {x.shape}")
    return float(f(x))


@dataclass(frozen=True)
class InitialData:
    """The four Cauchy data u, u_t, u_tt, u_ttt at t = 0."""

    phi0: ScalarField
    phi1: ScalarField
    phi2: ScalarField
    phi3: ScalarField

    def __post_init__(self):
        ns = {f.n for f in self.fields}
        if len(ns) != 1:
            raise FieldError(f"initial data fields disagree on dimension: {sorted(ns)}")

    @property
    def fields(self) -> tuple[ScalarField, ScalarField, ScalarField, ScalarField]:
        return (self.phi0, self.phi1, self.phi2, self.phi3)

    @property
    def n(self) -> int:
        return self.phi0.n

    @classmethod
    def zero(cls, n: int) -> InitialData:
        z = ZeroField(n)
        return cls(z, z, z, z)

    @classmethod
    def of(cls, n: int, phi0=None, phi1=None, phi2=None, phi3=None) -> InitialData:
        z = ZeroField(n)
        return cls(phi0 or z, phi1 or z, phi2 or z, phi3 or z)

    def combine(self, alpha: float, other: InitialData, beta: float) -> InitialData:
        """alpha * self + beta * other (trig-poly and zero fields only)."""
        return InitialData(*(alpha * f + beta * g for f, g in zip(self.fields, other.fields)))

    def shifted(self, dx) -> InitialData:
        return InitialData(*(f if f.is_zero else f.shifted(dx) for f in self.fields))


class ForcingField:
    """Right-hand side f(x, t) of the nonhomogeneous problem."""

    n: int

    def __call__(self, x, t) -> np.ndarray:
        x = _as_points(x, self.n)
        return self.at(float(t))(x)

    def at(self, t: float) -> ScalarField:
        """The spatial slice f(., t)."""
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False


class TrigForcing(ForcingField):
    """f(x, t) = sum_j g_j(t) P_j(x) with trig-poly spatial patterns P_j.

    Time amplitudes ``g_j`` are real callables of t.
    """

    def __init__(self, terms: Sequence[tuple[TrigPoly, Callable[[float], float]]], n: int | None = None):
        self.terms = tuple(terms)
        if not self.terms and n is None:
            raise FieldError("empty forcing needs an explicit dimension")
        self.n = self.terms[0][0].n if self.terms else n
        for p, _ in self.terms:
            if p.n != self.n:
                raise FieldError("forcing patterns disagree on dimension")

    @classmethod
    def zero(cls, n: int) -> TrigForcing:
        return cls((), n)

    @property
    def is_zero(self):
        return all(p.is_zero for p, _ in self.terms)

    def at(self, t):
        out: ScalarField = ZeroField(self.n)
        for p, g in self.terms:
            gt = float(g(t))
            if not math.isfinite(gt):
                raise FieldError(f"forcing amplitude undefined at t={t}")
            out = out + gt * p
        return out


class ClosureForcing(ForcingField):
    def __init__(self, fn: Callable[[np.ndarray, float], np.ndarray], n: int):
        self.fn = fn
        self.n = n

    def at(self, t):
        return ClosureField(lambda x, _t=t: self.fn(x, _t), self.n)


@dataclass(frozen=True)
class SolutionEvaluator:
    """Immutable map (x, t) -> u(x, t).

    ``fn`` receives points of shape (P, n) and times of shape (P,).
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    params: BiwaveParams
    provenance: str

    PROVENANCES = ("solver-1d", "solver-odd", "solver-even", "duhamel", "oracle", "derived")

    def __post_init__(self):
        if self.provenance not in self.PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def n(self) -> int:
        return self.params.n

    def __call__(self, x, t):
        x = _as_points(x, self.n)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], t.shape)
        xs = np.broadcast_to(x, shape + (self.n,)).reshape(-1, self.n)
        ts = np.broadcast_to(t, shape).reshape(-1)
        if np.any(ts < 0):
            raise ValueError("solutions are defined for t >= 0 only")
        out = np.asarray(self.fn(xs, ts), dtype=float).reshape(shape)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EvalGrid:
    """Tensor grid of spatial samples crossed with a list of times.

    Points are ordered time-major, then x1, ..., xn in row-major order.
    """

    ranges: tuple[tuple[float, float], ...]
    resolution: int
    times: tuple[float, ...]

    def __post_init__(self):
        if not self.ranges:
            raise ValueError("grid needs at least one spatial axis")
        if self.resolution < 1:
            raise ValueError("resolution must be >= 1")
        for lo, hi in self.ranges:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("non-finite axis bound")
            if self.resolution > 1 and not lo < hi:
                raise ValueError(f"axis range [{lo}, {hi}] is not increasing")
        if not self.times:
            raise ValueError("grid needs at least one time sample")
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValueError("time samples must be strictly increasing")
        if self.times[0] < 0:
            raise ValueError("time samples must be >= 0")

    @property
    def n(self) -> int:
        return len(self.ranges)

    def axes(self) -> list[np.ndarray]:
        if self.resolution == 1:
            return [np.array([lo]) for lo, _ in self.ranges]
        return [np.linspace(lo, hi, self.resolution) for lo, hi in self.ranges]

    def spatial_points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        xs = self.spatial_points()
        ts = np.asarray(self.times, dtype=float)
        return np.tile(xs, (len(ts), 1)), np.repeat(ts, len(xs))
