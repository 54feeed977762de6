"""Gamma-coordinates, Schatten norms, the potential Psi_gamma and its dualiser.

The gamma-embedding sends a state to ``rho**gamma / gamma``, a point of the
``L_{1/gamma}`` coordinate space. Coordinates at gamma and at 1 - gamma are
paired by the real trace form, and the convex potential

    Psi_gamma(x) = ||gamma x||_{1/gamma}^{1/gamma} / (1 - gamma)

has the map ``ell_{1-gamma} o ell_gamma^{-1}`` as its gradient (dualiser).
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraShape, HermitianElement, State, apply_spectral, matrix_power, trace_pairing
from .config import tolerances
from .errors import GammaMismatch, GammaOutOfRange, NotPositive, ShapeMismatch

__all__ = [
    "GammaVector",
    "ell_gamma",
    "ell_gamma_inverse",
    "schatten_norm",
    "psi_gamma",
    "psi_gamma_gradient",
    "pairing",
    "dualiser",
    "dualiser_inverse",
    "check_open_gamma",
    "classical_gamma_vector",
]

GAMMA_PAIR_TOL = 1e-12


def check_open_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 < gamma < 1.0:
        raise GammaOutOfRange(f"gamma must lie in (0, 1), got {gamma}")
    return gamma


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 < gamma <= 1.0:
        raise GammaOutOfRange(f"gamma must lie in (0, 1], got {gamma}")
    return gamma


class GammaVector(HermitianElement):
    """Hermitian element tagged with the exponent of its coordinate space."""

    def __init__(self, gamma: float, shape, blocks, *, check: bool = True):
        self.gamma = _check_gamma(gamma)
        super().__init__(shape, blocks, check=check)

    @classmethod
    def from_element(cls, gamma: float, x: HermitianElement) -> "GammaVector":
        return cls(gamma, x.shape, x.blocks, check=False)

    def _combine(self, blocks, other=None):
        if other is None or (isinstance(other, GammaVector) and other.gamma == self.gamma):
            return GammaVector(self.gamma, self.shape, blocks, check=False)
        return HermitianElement(self.shape, blocks, check=False)

    def __repr__(self):
        return f"GammaVector(gamma={self.gamma}, shape={list(self.shape)}, blocks={[b.tolist() for b in self.blocks]})"


def _require_psd(x: HermitianElement) -> None:
    psd_tol = tolerances().psd
    lam = x.eigenvalues()
    if lam.size and lam.min() < -psd_tol:
        raise NotPositive(f"coordinate has eigenvalue {lam.min():.3e} < -{psd_tol:g}")


def ell_gamma(omega: State, gamma: float) -> GammaVector:
    gamma = _check_gamma(gamma)
    if gamma == 1.0:
        return GammaVector(1.0, omega.shape, omega.blocks, check=False)
    powered = matrix_power(omega, gamma)
    return GammaVector(gamma, omega.shape, [b / gamma for b in powered.blocks], check=False)


def ell_gamma_inverse(x: GammaVector) -> State:
    """The state ``(gamma x)**(1/gamma)``."""
    _require_psd(x)
    g = x.gamma
    blocks = apply_spectral(x, lambda lam: np.clip(g * lam, 0.0, None) ** (1.0 / g))
    return State(x.shape, blocks, check=False)


def schatten_norm(x: HermitianElement, p: float) -> float:
    if not p >= 1.0:
        raise ValueError(f"Schatten exponent must be >= 1, got {p}")
    lam = np.abs(x.eigenvalues())
    if np.isinf(p):
        return float(lam.max(initial=0.0))
    return float(np.sum(lam ** p) ** (1.0 / p))


def psi_gamma(x: GammaVector) -> float:
    """``||gamma x||_{1/gamma}^{1/gamma} / (1 - gamma)`` using |eigenvalues|."""
    g = check_open_gamma(x.gamma)
    lam = np.abs(x.eigenvalues())
    return float(np.sum((g * lam) ** (1.0 / g)) / (1.0 - g))


def psi_gamma_gradient(x: GammaVector) -> GammaVector:
    """Gradient of Psi_gamma at a Hermitian point, a vector at ``1 - gamma``.

    Equal to :func:`dualiser` on the positive cone; off the cone the power
    is taken on ``|lambda|`` with the sign restored.
    """
    g = check_open_gamma(x.gamma)
    e = (1.0 - g) / g

    def fn(lam):
        return np.sign(lam) * (g * np.abs(lam)) ** e / (1.0 - g)

    return GammaVector(1.0 - g, x.shape, apply_spectral(x, fn), check=False)


def pairing(x: GammaVector, y: GammaVector) -> float:
    """``Re tr(x y)`` for coordinates at complementary gammas."""
    if abs(x.gamma + y.gamma - 1.0) > GAMMA_PAIR_TOL:
        raise GammaMismatch(f"gammas {x.gamma} and {y.gamma} are not complementary")
    if x.shape != y.shape:
        raise ShapeMismatch(f"shapes {list(x.shape)} and {list(y.shape)} differ")
    return trace_pairing(x, y)


def dualiser(x: GammaVector) -> GammaVector:
    """``ell_{1-gamma}(ell_gamma^{-1}(x))`` on the positive cone.

    Involutive across gamma <-> 1 - gamma: ``dualiser(dualiser(x)) == x``.
    """
    g = check_open_gamma(x.gamma)
    _require_psd(x)
    e = (1.0 - g) / g
    blocks = apply_spectral(x, lambda lam: (g * np.clip(lam, 0.0, None)) ** e / (1.0 - g))
    return GammaVector(1.0 - g, x.shape, blocks, check=False)


def dualiser_inverse(y: GammaVector) -> GammaVector:
    """Inverse of the dualiser of ``Psi_{1 - y.gamma}``; same map as ``dualiser(y)``."""
    return dualiser(y)


def classical_gamma_vector(weights, gamma: float) -> GammaVector:
    """Gamma-coordinate of a classical weight vector."""
    w = np.asarray(weights, dtype=float).ravel()
    shape = AlgebraShape.classical(w.size)
    return GammaVector(gamma, shape, [[[v]] for v in w])
