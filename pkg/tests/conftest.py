import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from walshlab.dyadic import DyadicSet, DyadicStep

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

finite_values = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def steps(draw, max_order=6, elements=finite_values):
    n = draw(st.integers(0, max_order))
    values = draw(st.lists(elements, min_size=1 << n, max_size=1 << n))
    return DyadicStep(values)


@st.composite
def dyadic_sets(draw, max_order=4):
    s = draw(st.integers(0, max_order))
    mask = draw(st.lists(st.booleans(), min_size=1 << s, max_size=1 << s).filter(any))
    return DyadicSet(mask)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_step(rng, order, scale=10.0):
    return DyadicStep(scale * rng.standard_normal(1 << order))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        passed, text = lines[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {text}")
