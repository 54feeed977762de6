import numpy as np
import pytest

from qgamma import State


@pytest.fixture
def p_half():
    return State.from_weights([0.5, 0.5])


@pytest.fixture
def q_skew():
    return State.from_weights([0.75, 0.25])


@pytest.fixture
def projector_pair():
    """diag(1, 0) and the projector onto (|0> + |1>)/sqrt 2."""
    return State([2], [np.diag([1.0, 0.0])]), State([2], [np.full((2, 2), 0.5)])


@pytest.fixture(autouse=True)
def _clean_tolerance_env(monkeypatch):
    monkeypatch.delenv("QGAMMA_PSD_TOL", raising=False)
    monkeypatch.delenv("QGAMMA_SOLVER_TOL", raising=False)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
