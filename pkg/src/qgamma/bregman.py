"""Bregman functionals of Psi_gamma and their Legendre-Fenchel structure.

Two forms are provided. The generalized form pairs a primal point ``x``
(gamma) with a dual point ``y`` (1 - gamma)::

    D_Psi(x, y) = Psi_gamma(x) + Psi_{1-gamma}(y) - Re<x, y>

where ``Psi_{1-gamma}`` is the closed-form conjugate of ``Psi_gamma``. The
standard form keeps both arguments at gamma and evaluates the gradient at
the second one::

    Dbar(x, y) = Psi_gamma(x) - Psi_gamma(y) - Re<x - y, f(y)>

with ``f`` the dualiser, so that ``Dbar(x, y) == D_Psi(x, f(y))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .algebra import trace_pairing
from .config import tolerances
from .embeddings import (
    GammaVector,
    check_open_gamma,
    dualiser,
    pairing,
    psi_gamma,
    psi_gamma_gradient,
)
from .errors import GammaMismatch, MaxIterationsWarning

__all__ = [
    "generalized_bregman",
    "standard_bregman",
    "FenchelEstimate",
    "fenchel_dual_estimate",
    "young_fenchel_residual",
    "representation_index_duality_residual",
    "frechet_derivative",
]


def generalized_bregman(x: GammaVector, y: GammaVector) -> float:
    check_open_gamma(x.gamma)
    return psi_gamma(x) + psi_gamma(y) - pairing(x, y)


def young_fenchel_residual(x: GammaVector, y: GammaVector) -> float:
    """``Psi(x) + Psi*(y) - Re<x, y>`` with the conjugate in closed form.

    Nonnegative, and zero exactly when ``y`` is the gradient of Psi at ``x``.
    Numerically the same expression as :func:`generalized_bregman`.
    """
    return generalized_bregman(x, y)


def standard_bregman(x: GammaVector, y: GammaVector) -> float:
    if x.gamma != y.gamma:
        raise GammaMismatch(f"standard Bregman needs equal gammas, got {x.gamma} and {y.gamma}")
    fy = dualiser(y)
    return psi_gamma(x) - psi_gamma(y) - trace_pairing(x - y, fy)


def representation_index_duality_residual(x: GammaVector, y: GammaVector) -> float:
    """``Dbar_gamma(y, x) - Dbar_{1-gamma}(f(x), f(y))``; zero up to roundoff."""
    return standard_bregman(y, x) - standard_bregman(dualiser(x), dualiser(y))


def frechet_derivative(x: GammaVector, direction) -> float:
    """Directional derivative of Psi_gamma at ``x``: ``Re<direction, f(x)>``."""
    return trace_pairing(direction, psi_gamma_gradient(x))


@dataclass(frozen=True)
class FenchelEstimate:
    value: float
    iterations: int
    gradient_residual: float
    converged: bool
    argmax: GammaVector


def fenchel_dual_estimate(
    y: GammaVector,
    tol: float | None = None,
    max_iter: int = 10_000,
    start: str | GammaVector = "warm",
) -> FenchelEstimate:
    """Estimate ``Psi_gamma*(y) = sup_x Re<x, y> - Psi_gamma(x)`` by gradient ascent.

    ``y`` lives at ``1 - gamma``; the supremum runs over Hermitian ``x`` at
    gamma. ``start`` is ``"warm"`` (the known maximizer, the gradient of
    ``Psi_{1-gamma}`` at ``y``), ``"zero"``, or an explicit starting
    vector. Steps are Barzilai-Borwein
    with Armijo backtracking, so every accepted iterate increases the
    objective and ``value`` is always a lower bound for the supremum.
    """
    gamma = check_open_gamma(1.0 - y.gamma)
    tol = tolerances().solver if tol is None else tol

    def objective(x):
        return trace_pairing(x, y) - psi_gamma(x)

    def ascent_direction(x):
        return GammaVector.from_element(gamma, y - psi_gamma_gradient(x))

    if isinstance(start, GammaVector):
        x = start
    elif start == "warm":
        x = psi_gamma_gradient(y)
    elif start == "zero":
        x = GammaVector.from_element(gamma, y * 0.0)
    else:
        raise ValueError(f"unknown start {start!r}")

    val = objective(x)
    grad = ascent_direction(x)
    gnorm = grad.norm()
    step = 1.0
    prev_x = prev_g = None
    it = 0
    while gnorm > tol and it < max_iter:
        it += 1
        if prev_x is not None:
            s = x - prev_x
            dg = prev_g - grad  # gradient of the concave objective decreases along s
            curv = trace_pairing(s, dg)
            if curv > 0:
                step = min(max(trace_pairing(s, s) / curv, 1e-12), 1e12)
        while True:
            cand = GammaVector.from_element(gamma, x + step * grad)
            cval, cgrad = objective(cand), ascent_direction(cand)
            # concave along the step: a nonnegative end slope certifies ascent
            if cval >= val + 1e-4 * step * gnorm ** 2 or trace_pairing(cgrad, grad) >= 0.0:
                break
            step *= 0.5
            if step < 1e-20:
                break
        if step < 1e-20:
            break
        prev_x, prev_g = x, grad
        x, grad = cand, cgrad
        val = max(val, cval)
        gnorm = grad.norm()

    converged = gnorm <= tol
    if not converged:
        warnings.warn(f"Fenchel ascent stopped after {it} iterations, residual {gnorm:.3e}",
                      MaxIterationsWarning, stacklevel=2)
    return FenchelEstimate(value=float(val), iterations=it, gradient_residual=float(gnorm),
                           converged=converged, argmax=x)
