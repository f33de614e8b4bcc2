import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biwave import Gaussian, TrigPoly, ZeroField
from biwave.cli import bundled_scenarios, load_bundled
from biwave.scenario import (ScenarioError, parse_field, parse_scenario, parse_time_amplitude,
                             serialize_scenario)

MINIMAL = """
[params]
a = {a}
b = {b}
n = 1

[data]
phi0 = "cos(x1)"

[grid]
ranges = [[0.0, 1.0]]
resolution = 3
times = [0.5]

[task]
kind = "solve"
"""


def test_bundled_worked_example():
    sc = parse_scenario(load_bundled("example-1d"))
    p = sc.biwave_params()
    assert (p.a, p.b, p.n) == (1.0, 0.5, 1)
    data = sc.initial_data()
    assert data.phi1 == TrigPoly.sin([1]) and data.phi2 == TrigPoly.cos([1])
    assert data.phi0.is_zero and data.phi3.is_zero
    grid = sc.eval_grid()
    assert grid.resolution == 101 and len(grid.times) == 21


def test_empty_file():
    with pytest.raises(ScenarioError):
        parse_scenario("")


def test_degenerate_speeds():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(MINIMAL.format(a=1.0, b=1.0))
    assert exc.value.code == "degenerate-speeds" and exc.value.path == "params"


def test_unknown_keys_and_sections():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(MINIMAL.format(a=1.0, b=0.5) + "extra = 1\n")
    assert exc.value.path == "task.extra"
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(MINIMAL.format(a=1.0, b=0.5) + "[plots]\nx = 1\n")
    assert exc.value.path == "plots"


def test_syntax_error_reports_line():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario("[params]\na = 1\nb = = 2\n")
    assert "line 3" in str(exc.value)


@pytest.mark.parametrize("mutation, path", [
    (("kind = \"solve\"", "kind = \"plot\""), "task.kind"),
    (("phi0 = \"cos(x1)\"", "phi0 = \"cos(y)\""), "data.phi0"),
    (("ranges = [[0.0, 1.0]]", "ranges = [[0.0, 1.0], [0.0, 1.0]]"), "grid.ranges"),
    (("times = [0.5]", "times = [0.5, 0.2]"), "grid"),
    (("a = 1.0", "a = \"fast\""), "params.a"),
    (("n = 1", ""), "params.n"),
])
def test_validation_paths(mutation, path):
    text = MINIMAL.format(a=1.0, b=0.5).replace(*mutation)
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text)
    assert exc.value.path == path


def test_missing_sections():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(MINIMAL.format(a=1.0, b=0.5).replace("[data]\nphi0 = \"cos(x1)\"\n", ""))
    assert exc.value.path == "data"


@pytest.mark.parametrize("text, n, expected", [
    ("zero", 2, ZeroField(2)),
    ("cos(x1)", 1, TrigPoly.cos([1])),
    ("sin(x)", 1, TrigPoly.sin([1])),
    ("1/2 sin(x1 - 2 x2)", 2, TrigPoly.sin([1, -2], 0.5)),
    ("-3*cos(2*x1 + x3)", 3, TrigPoly.cos([2, 0, 1], -3.0)),
    ("const 2.5", 2, TrigPoly.constant(2.5, 2)),
    ("cos(x1) + 0.25", 1, TrigPoly.cos([1]) + TrigPoly.constant(0.25, 1)),
    ("cos(x1) - sin(x1)", 1, TrigPoly.cos([1]) - TrigPoly.sin([1])),
])
def test_field_grammar(text, n, expected):
    assert parse_field(text, n) == expected


def test_gaussian_grammar():
    g = parse_field("gaussian([0.5, -1], 2)", 2)
    assert isinstance(g, Gaussian) and g.width == 2.0
    np.testing.assert_array_equal(g.center, [0.5, -1.0])
    h = parse_field("2 gaussian([0], 1) + cos(x1)", 1)
    assert h(np.array([0.0])) == pytest.approx(3.0)


def test_base_frequency():
    f = parse_field("cos(x1)", 1, base_frequency=0.5)
    assert f(np.array([math.pi])) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("text", ["", "cos(x1", "cos(1/2 x1)", "tan(x1)", "zero + cos(x1)", "cos(x4)",
                                  "gaussian([0, 0], 1)", "cos(x1) * 2", "3/0"])
def test_field_grammar_errors(text):
    with pytest.raises(ScenarioError):
        parse_field(text, 1, path="data.phi0")


def test_time_amplitude():
    g = parse_time_amplitude("cos(t) + 1/2")
    assert g(0.0) == pytest.approx(1.5)
    assert parse_time_amplitude("1")(7.0) == 1.0


@pytest.mark.parametrize("name", ["duhamel-smoke", "elasto-demo", "even2-smoke", "example-1d", "odd3-smoke"])
def test_bundled_round_trip(name):
    assert name in bundled_scenarios()
    sc = parse_scenario(load_bundled(name))
    assert parse_scenario(serialize_scenario(sc)) == sc


_coef = st.fractions(min_value=-5, max_value=5, max_denominator=8)
_wave = st.lists(st.integers(-3, 3), min_size=2, max_size=2)


@st.composite
def _expr(draw):
    terms = []
    for _ in range(draw(st.integers(1, 3))):
        c = draw(_coef)
        k = draw(_wave)
        lin = " + ".join(f"{ki} x{i + 1}" for i, ki in enumerate(k))
        terms.append(f"{c} {draw(st.sampled_from(['cos', 'sin']))}({lin})")
    return " + ".join(terms)


@settings(max_examples=40, deadline=None)
@given(_expr(), st.floats(1.1, 5.0), st.floats(0.1, 1.0), st.sampled_from(["solve", "oracle-compare"]))
def test_round_trip_property(expr, a, b, kind):
    text = f"""
[params]
a = {a!r}
b = {b!r}
n = 2
[data]
phi1 = {expr!r}
base_frequency = 0.5
[grid]
ranges = [[-1.0, 1.0], [0.0, 2.0]]
resolution = 2
times = [0.0, 1.0]
[task]
kind = "{kind}"
tolerance = 1e-6
[solver]
quad_order = 16
""".replace("'", '"')
    sc = parse_scenario(text)
    assert parse_scenario(serialize_scenario(sc)) == sc
