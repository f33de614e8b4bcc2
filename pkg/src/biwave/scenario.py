"""Scenario files: a TOML subset with [params], [data], [forcing], [potential],
[grid], [task] and [solver] sections.

Field expressions use a fixed grammar::

    expr  := "zero" | term (("+" | "-") term)*
    term  := [number ["*"]] atom | number
    atom  := ("cos" | "sin") "(" linear ")"
           | "const" number
           | "gaussian" "(" "[" number ("," number)* "]" "," number ")"
    linear := [int ["*"]] var (("+" | "-") [int ["*"]] var)*   (ints may be signed)

Numbers may be rationals like ``-1/2``. Variables are x1..xn (``x`` when
n = 1); forcing time amplitudes use the variable ``t``.
"""

from __future__ import annotations

import json
import math
import re
import sys
from dataclasses import dataclass, fields
from fractions import Fraction

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .elastokit import ElasticParams, lame_to_speeds
from .fields import (BiwaveParams, EvalGrid, FieldError, Gaussian, InitialData, ParamError,
                     ScalarField, TrigForcing, TrigPoly, ZeroField, make_params)

__all__ = [
    "ScenarioError",
    "Scenario",
    "TASKS",
    "parse_scenario",
    "serialize_scenario",
    "parse_field",
    "parse_time_amplitude",
]

TASKS = ("solve", "oracle-compare", "residual", "initial-check", "elastokit-demo")

_SECTIONS = {
    "params": {"a", "b", "n", "lambda", "mu", "rho"},
    "data": {"phi0", "phi1", "phi2", "phi3", "base_frequency"},
    "forcing": {"terms"},
    "potential": {"w1", "w2", "w3", "w4", "w5", "w6", "w7"},
    "grid": {"ranges", "resolution", "times"},
    "task": {"kind", "tolerance", "output", "eps", "h", "probes"},
    "solver": {"quad_order", "sphere_level", "h_rel", "t_eps", "tau_order"},
}


class ScenarioError(ValueError):
    """Parse or validation failure; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = "", code: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.code = code


# --- expression grammar ---------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
                    r"|([A-Za-z_]\w*)|(.))")


def _tokenize(text):
    out = []
    for m in _TOKEN.finditer(text):
        num, ident, sym = m.groups()
        if num is not None:
            out.append(("num", num))
        elif ident is not None:
            out.append(("id", ident))
        elif sym is not None and not sym.isspace():
            out.append(("sym", sym))
    return out


class _Parser:
    def __init__(self, text, variables, path):
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = variables
        self.path = path
        self.text = text

    def error(self, msg):
        return ScenarioError(f"{msg} in {self.text!r}", self.path)

    def peek(self, kind=None, value=None):
        if self.i >= len(self.toks):
            return None
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            return None
        return tok

    def take(self, kind=None, value=None):
        tok = self.peek(kind, value)
        if tok is None:
            found = self.toks[self.i][1] if self.i < len(self.toks) else "end of input"
            raise self.error(f"expected {value or kind}, found {found!r}")
        self.i += 1
        return tok

    def number(self) -> Fraction:
        sign = 1
        while self.peek("sym", "-") or self.peek("sym", "+"):
            if self.take()[1] == "-":
                sign = -sign
        val = Fraction(self.take("num")[1])
        if self.peek("sym", "/"):
            self.take()
            den = Fraction(self.take("num")[1])
            if den == 0:
                raise self.error("division by zero")
            val /= den
        return sign * val

    def linear(self):
        k = [0] * (max(self.vars.values()) + 1)
        first = True
        while True:
            sign = 1
            if self.peek("sym", "+") or self.peek("sym", "-"):
                sign = -1 if self.take()[1] == "-" else 1
            elif not first:
                break
            coef = Fraction(1)
            if self.peek("num") or self.peek("sym", "-") or self.peek("sym", "+"):
                coef = self.number()
                if self.peek("sym", "*"):
                    self.take()
            name = self.take("id")[1]
            if name not in self.vars:
                raise self.error(f"unknown variable {name!r}")
            if coef.denominator != 1:
                raise self.error("wave numbers must be integers")
            k[self.vars[name]] += sign * int(coef)
            first = False
        return k

    def atom(self, n, base):
        name = self.take("id")[1]
        if name in ("cos", "sin"):
            self.take("sym", "(")
            k = self.linear()
            self.take("sym", ")")
            return getattr(TrigPoly, name)(k, 1.0, base)
        if name == "const":
            return TrigPoly.constant(float(self.number()), n, base)
        if name == "gaussian":
            self.take("sym", "(")
            self.take("sym", "[")
            centre = [float(self.number())]
            while self.peek("sym", ","):
                self.take()
                centre.append(float(self.number()))
            self.take("sym", "]")
            self.take("sym", ",")
            width = float(self.number())
            self.take("sym", ")")
            if len(centre) != n:
                raise self.error(f"gaussian centre needs {n} coordinates")
            return Gaussian(centre, width)
        raise self.error(f"unknown function {name!r}")

    def term(self, n, base):
        if self.peek("num") or self.peek("sym", "-") or self.peek("sym", "+"):
            coef = self.number()
            if self.peek("sym", "*"):
                self.take()
                return _scale(self.atom(n, base), float(coef))
            if self.peek("id"):
                return _scale(self.atom(n, base), float(coef))
            return TrigPoly.constant(float(coef), n, base)
        return self.atom(n, base)

    def expr(self, n, base) -> ScalarField:
        if self.peek("id", "zero"):
            self.take()
            if self.i != len(self.toks):
                raise self.error("'zero' must stand alone")
            return ZeroField(n)
        out = self.term(n, base)
        while self.i < len(self.toks):
            sign = self.take("sym")[1]
            if sign not in "+-":
                raise self.error(f"unexpected {sign!r}")
            part = self.term(n, base)
            out = out + (part if sign == "+" else _scale(part, -1.0))
        return out


def _scale(f: ScalarField, c: float) -> ScalarField:
    if isinstance(f, (TrigPoly, ZeroField)):
        return c * f
    if isinstance(f, Gaussian):
        return Gaussian(f.center, f.width, c * f.amplitude)
    raise FieldError("cannot scale this field")


def _variables(n):
    names = {f"x{i + 1}": i for i in range(n)}
    if n == 1:
        names["x"] = 0
    return names


def parse_field(text: str, n: int, base_frequency: float = 1.0, path: str = "") -> ScalarField:
    if not isinstance(text, str) or not text.strip():
        raise ScenarioError("empty field expression", path)
    return _Parser(text, _variables(n), path).expr(n, base_frequency)


def parse_time_amplitude(text: str, path: str = ""):
    """A real function of t written in the field grammar (variable ``t``)."""
    if not isinstance(text, str) or not text.strip():
        raise ScenarioError("empty time expression", path)
    f = _Parser(text, {"t": 0}, path).expr(1, 1.0)
    return lambda t: float(f(np.asarray([float(t)])))


# --- scenario -----------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """Raw, validated scenario content; builders turn it into library objects."""

    params: tuple
    data: tuple = ()
    base_frequency: float = 1.0
    forcing: tuple = ()
    potential: tuple = ()
    grid: tuple = ()
    task: tuple = ()
    solver: tuple = ()

    def section(self, name) -> dict:
        return dict(getattr(self, name))

    @property
    def n(self) -> int:
        return int(self.section("params")["n"])

    @property
    def kind(self) -> str:
        return self.section("task")["kind"]

    @property
    def lame(self) -> ElasticParams | None:
        p = self.section("params")
        if "lambda" in p:
            return ElasticParams(float(p["lambda"]), float(p["mu"]), float(p["rho"]))
        return None

    def biwave_params(self) -> BiwaveParams:
        p = self.section("params")
        if self.lame is not None:
            return lame_to_speeds(self.lame, self.n)
        return make_params(p["a"], p["b"], self.n)

    def initial_data(self) -> InitialData:
        d = self.section("data")
        n = self.n
        fs = [parse_field(d.get(k, "zero"), n, self.base_frequency, f"data.{k}")
              for k in ("phi0", "phi1", "phi2", "phi3")]
        return InitialData(*fs)

    def forcing_field(self) -> TrigForcing | None:
        terms = dict(self.forcing).get("terms")
        if not terms:
            return None
        out = []
        for i, (space, time) in enumerate(terms):
            p = parse_field(space, self.n, self.base_frequency, f"forcing.terms[{i}][0]")
            if not isinstance(p, (TrigPoly, ZeroField)):
                raise ScenarioError("forcing patterns must be trig polynomials", f"forcing.terms[{i}][0]")
            if isinstance(p, ZeroField):
                continue
            out.append((p, parse_time_amplitude(time, f"forcing.terms[{i}][1]")))
        return TrigForcing(out, self.n)

    def potential_data(self) -> list[InitialData]:
        pot = self.section("potential")
        n = self.n
        out = []
        for c in range(n):
            spec = pot.get(f"w{c + 1}")
            if spec is None:
                out.append(InitialData.zero(n))
                continue
            out.append(InitialData(*(parse_field(e, n, self.base_frequency, f"potential.w{c + 1}[{j}]")
                                     for j, e in enumerate(spec))))
        return out

    def eval_grid(self) -> EvalGrid:
        g = self.section("grid")
        try:
            return EvalGrid(tuple(tuple(map(float, r)) for r in g["ranges"]), int(g["resolution"]),
                            tuple(float(t) for t in g["times"]))
        except ValueError as exc:
            raise ScenarioError(str(exc), "grid") from exc


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, dict):
        return tuple(sorted((k, _freeze(x)) for k, x in v.items()))
    return v


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


def _require(sec, key, path, types):
    if key not in sec:
        raise ScenarioError("missing required key", f"{path}.{key}")
    if not isinstance(sec[key], types) or isinstance(sec[key], bool):
        raise ScenarioError(f"expected {types}, got {type(sec[key]).__name__}", f"{path}.{key}")
    return sec[key]


def parse_scenario(text: str) -> Scenario:
    if not text.strip():
        raise ScenarioError("empty scenario", "<file>")
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"parse error: {exc}", "<file>") from exc

    for name, sec in raw.items():
        if name not in _SECTIONS:
            raise ScenarioError("unknown section", name)
        if not isinstance(sec, dict):
            raise ScenarioError("expected a section table", name)
        for key in sec:
            if key not in _SECTIONS[name]:
                raise ScenarioError("unknown key", f"{name}.{key}")

    for need in ("params", "grid", "task"):
        if need not in raw:
            raise ScenarioError("missing required section", need)

    params = raw["params"]
    n = _require(params, "n", "params", int)
    if "lambda" in params:
        if "a" in params or "b" in params:
            raise ScenarioError("give either speeds (a, b) or Lame parameters, not both", "params")
        for k in ("lambda", "mu", "rho"):
            _require(params, k, "params", (int, float))
        try:
            lame_to_speeds(ElasticParams(float(params["lambda"]), float(params["mu"]),
                                         float(params["rho"])), n)
        except ParamError as exc:
            raise ScenarioError(str(exc), "params", exc.code) from exc
    else:
        a = _require(params, "a", "params", (int, float))
        b = _require(params, "b", "params", (int, float))
        try:
            make_params(a, b, n)
        except ParamError as exc:
            raise ScenarioError(str(exc), "params", exc.code) from exc

    task = raw["task"]
    kind = _require(task, "kind", "task", str)
    if kind not in TASKS:
        raise ScenarioError(f"unknown task {kind!r}; expected one of {TASKS}", "task.kind")
    for k in ("tolerance", "eps", "h"):
        if k in task:
            v = _require(task, k, "task", (int, float))
            if not (math.isfinite(v) and v > 0):
                raise ScenarioError("must be a positive number", f"task.{k}")

    data = raw.get("data", {})
    base = data.get("base_frequency", 1.0)
    if kind == "elastokit-demo":
        if "lambda" not in params:
            raise ScenarioError("elastokit-demo needs Lame parameters", "params")
        if "potential" not in raw:
            raise ScenarioError("elastokit-demo needs a [potential] section", "potential")
    elif "data" not in raw:
        raise ScenarioError("missing required section", "data")

    sc = Scenario(
        params=_freeze(params),
        data=_freeze({k: v for k, v in data.items() if k != "base_frequency"}),
        base_frequency=float(base),
        forcing=_freeze(raw.get("forcing", {})),
        potential=_freeze(raw.get("potential", {})),
        grid=_freeze(raw["grid"]),
        task=_freeze(task),
        solver=_freeze(raw.get("solver", {})),
    )
    # build everything once so field/grid errors surface with their paths
    sc.initial_data() if "data" in raw else None
    sc.forcing_field()
    if kind == "elastokit-demo":
        for c, spec in sc.section("potential").items():
            if int(c[1:]) > n or len(spec) != 4:
                raise ScenarioError("potential components need 4 data expressions and index <= n",
                                    f"potential.{c}")
        sc.potential_data()
    grid = sc.eval_grid()
    if grid.n != n:
        raise ScenarioError(f"grid has {grid.n} axes, scenario n = {n}", "grid.ranges")
    return sc


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def serialize_scenario(sc: Scenario) -> str:
    lines = []
    for f in fields(Scenario):
        if f.name == "base_frequency":
            continue
        items = dict(getattr(sc, f.name))
        if f.name == "data" and (items or sc.base_frequency != 1.0):
            items["base_frequency"] = sc.base_frequency
        if not items:
            continue
        lines.append(f"[{f.name}]")
        for k, v in items.items():
            lines.append(f"{k} = {_toml_value(_thaw(v))}")
        lines.append("")
    return "\n".join(lines)
