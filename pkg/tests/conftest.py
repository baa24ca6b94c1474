import numpy as np
import pytest

from specband.checks import simulate_stationary_ar1


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ar1_long():
    """One long stationary AR(1) path, phi = 0.8, unit innovations."""
    return simulate_stationary_ar1(0.8, 1_000_000, 1, np.random.default_rng(99))[0]


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record a criterion verdict; collected lines are echoed in the terminal summary."""

    def _report(line: str):
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
