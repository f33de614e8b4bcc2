import numpy as np
import pytest

from biwave import InitialData, TrigPoly, ZeroField

_CRITERIA: dict[str, tuple[bool, str]] = {}


def random_trig(rng, n, max_norm=3.0, terms=2, base=1.0):
    """Real trig polynomial: a few cos/sin terms, integer wavevectors with |k| <= max_norm."""
    out = ZeroField(n)
    reach = int(max_norm)
    while terms:
        k = rng.integers(-reach, reach + 1, size=n)
        if k @ k > max_norm ** 2:
            continue
        amp = rng.uniform(-1, 1)
        out = out + (TrigPoly.cos(k, amp, base) if rng.random() < 0.5 else TrigPoly.sin(k, amp, base))
        terms -= 1
    return out


def random_data(rng, n, max_norm=3.0, terms=2):
    return InitialData(*(random_trig(rng, n, max_norm, terms) for _ in range(4)))


def amplitude_scale(data):
    """Largest sup-norm bound sum |c_k| over the four fields."""
    return max((sum(abs(c) for c in f.modes.values()) for f in data.fields
                if isinstance(f, TrigPoly) and not f.is_zero), default=0.0)


@pytest.fixture
def rng(request):
    # seeded from the test name so every run draws the same cases
    return np.random.default_rng(sum(map(ord, request.node.name)))


@pytest.fixture
def criterion():
    def record(name, ok, detail):
        _CRITERIA[name] = (bool(ok), detail)
        print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split()[1])):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
