import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from superexpander.graph_core import random_regular

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def regular_graphs(draw, max_n=12, max_d=5):
    """Seeded random regular multigraphs (loops allowed)."""
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(1, max_d))
    if (n * d) % 2:
        d += 1
    seed = draw(st.integers(0, 2**32 - 1))
    return random_regular(n, d, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion and return the outcome."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number:>2} {title}: {'PASS' if passed else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
