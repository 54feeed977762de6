"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test records a single PASS/FAIL line; conftest prints them in the
terminal summary so they show up in a plain ``pytest -v`` run.
"""

import pytest

from qgamma.checks import CRITERIA, run_criterion

REPORT: list[str] = []

ORDER = [
    "special_cases",
    "index_duality",
    "bregman_equivalence",
    "quasi_equivalence",
    "markov_monotonicity",
    "channel_duality",
    "cosine_identity",
    "boundary_limit",
    "hilbert_case",
    "projection",
    "fenchel_conjugate",
    "gradient_check",
]


def test_every_criterion_is_listed():
    assert sorted(ORDER) == sorted(CRITERIA)


@pytest.mark.parametrize("number,name", list(enumerate(ORDER, start=1)), ids=[f"c{i:02d}_{n}" for i, n in enumerate(ORDER, 1)])
def test_criterion(number, name):
    result = run_criterion(name, seed=0)
    line = f"criterion {number:2d}: {result.line()}"
    REPORT.append(line)
    print(line)
    assert result.passed, result.line()
