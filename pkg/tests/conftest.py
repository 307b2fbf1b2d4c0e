import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from plateforge.mesh import SectionArray

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def sections(draw, min_angle=0.25):
    """A single well-shaped counter-clockwise section (center, node1, node2)."""
    cx = draw(st.floats(-3, 3))
    cy = draw(st.floats(-3, 3))
    r1 = draw(st.floats(0.3, 3.0))
    r2 = draw(st.floats(0.3, 3.0))
    a1 = draw(st.floats(0, 2 * math.pi))
    a2 = a1 + draw(st.floats(min_angle, math.pi - min_angle))
    x0 = np.array([cx, cy])
    x1 = x0 + r1 * np.array([math.cos(a1), math.sin(a1)])
    x2 = x0 + r2 * np.array([math.cos(a2), math.sin(a2)])
    return SectionArray(x0[None], x1[None], x2[None], np.array([0]), np.array([1]), np.array([0]))


parametric_points = st.tuples(st.floats(0.05, 1.0), st.floats(-1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_triangle():
    return SectionArray(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]),
                        np.array([0]), np.array([1]), np.array([0]))


ACCEPTANCE_LINES: list = []


@pytest.fixture
def record():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def add(label, passed, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}  ({detail})")

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
