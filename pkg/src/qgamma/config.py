"""Numerical tolerances, with environment overrides.

``QGAMMA_PSD_TOL`` overrides the eigenvalue clipping threshold and
``QGAMMA_SOLVER_TOL`` the default stopping tolerance of the iterative
solvers. Values are read on every call so the CLI can set them late.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

HERM_TOL = 1e-10
PSD_TOL = 1e-10
SPEC_TOL = 1e-9
SOLVER_TOL = 1e-8
DIV_SLACK = 1e-9

ENV_PSD = "QGAMMA_PSD_TOL"
ENV_SOLVER = "QGAMMA_SOLVER_TOL"


@dataclass(frozen=True)
class Tolerances:
    herm: float = HERM_TOL
    psd: float = PSD_TOL
    spec: float = SPEC_TOL
    solver: float = SOLVER_TOL
    div_slack: float = DIV_SLACK


def _parse(name: str, raw: str | None, default: float) -> float:
    if raw is None or raw == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name}={raw!r} is not a number") from None
    if not value >= 0.0:
        raise ValueError(f"{name}={raw!r} must be a nonnegative float")
    return value


@lru_cache(maxsize=32)
def _build(psd_raw: str | None, solver_raw: str | None) -> Tolerances:
    return Tolerances(
        psd=_parse(ENV_PSD, psd_raw, PSD_TOL),
        solver=_parse(ENV_SOLVER, solver_raw, SOLVER_TOL),
    )


def tolerances() -> Tolerances:
    """Current tolerances; raises ``ValueError`` on a malformed override."""
    return _build(os.environ.get(ENV_PSD), os.environ.get(ENV_SOLVER))
