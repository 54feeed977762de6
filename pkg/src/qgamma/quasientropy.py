"""Petz quasi-entropies through the spectral data of the relative modular operator.

On a block-diagonal algebra the relative modular operator
``Delta(X) = rho_w X rho_f^{-1}`` has eigenvalues ``alpha_i / beta_j`` with
eigenvectors ``|a_i><b_j|`` (``a_i``, ``b_j`` eigenvectors of ``rho_w``,
``rho_f`` in the same block). The vector representative of ``phi`` has
weight ``beta_j |<a_i|b_j>|^2`` on each of them, so

    <xi_f, g(Delta) xi_f> = sum_ij g(alpha_i / beta_j) beta_j |<a_i|b_j>|^2.

The d^2 x d^2 operator itself is never formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import State
from .config import tolerances
from .embeddings import check_open_gamma
from .errors import ShapeMismatch

__all__ = [
    "RelativeModularData",
    "relative_modular_data",
    "f_gamma",
    "quasi_entropy",
    "quasi_entropy_gamma",
    "modular_power_trace",
]


@dataclass(frozen=True)
class RelativeModularData:
    """Eigenvalues of both densities and the overlap matrix ``|<a_i|b_j>|^2``.

    ``overlap`` is block-diagonal over the algebra blocks and doubly
    stochastic.
    """

    alphas: np.ndarray
    betas: np.ndarray
    overlap: np.ndarray


def relative_modular_data(omega: State, phi: State) -> RelativeModularData:
    if omega.shape != phi.shape:
        raise ShapeMismatch(f"shapes {list(omega.shape)} and {list(phi.shape)} differ")
    sw, sf = omega.spectrum, phi.spectrum
    n = omega.shape.hilbert_dim
    overlap = np.zeros((n, n))
    for o, d, va, vb in zip(omega.shape.offsets, omega.shape.blocks, sw.eigenvectors, sf.eigenvectors):
        overlap[o:o + d, o:o + d] = np.abs(va.conj().T @ vb) ** 2
    return RelativeModularData(sw.all_eigenvalues().clip(min=0.0), sf.all_eigenvalues().clip(min=0.0), overlap)


def f_gamma(t, gamma: float):
    """``1/gamma + t/(1 - gamma) - t**gamma / (gamma (1 - gamma))``; vanishes at t = 1."""
    g = check_open_gamma(gamma)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("f_gamma is defined for t >= 0")
    out = 1.0 / g + t / (1.0 - g) - t ** g / (g * (1.0 - g))
    return float(out) if out.ndim == 0 else out


def modular_power_trace(data: RelativeModularData, gamma: float) -> float:
    """``sum_ij (alpha_i / beta_j)**gamma beta_j overlap_ij`` over ``beta_j > 0``."""
    a = data.alphas[:, None]
    b = data.betas[None, :]
    mask = (b > tolerances().psd) & (data.overlap > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(mask, (a / np.where(mask, b, 1.0)) ** gamma * b * data.overlap, 0.0)
    return float(np.sum(terms))


def quasi_entropy_gamma(omega: State, phi: State, gamma: float) -> float:
    """Petz quasi-entropy with ``f_gamma``; coincides with ``D_gamma(omega, phi)``.

    Kernel terms take the limits of ``f_gamma(alpha / beta) beta``:
    ``alpha / (1 - gamma)`` as ``beta -> 0`` and ``beta / gamma`` at ``alpha = 0``.
    """
    g = check_open_gamma(gamma)
    data = relative_modular_data(omega, phi)
    eps = tolerances().psd
    a = np.where(data.alphas > eps, data.alphas, 0.0)[:, None]
    b = np.where(data.betas > eps, data.betas, 0.0)[None, :]
    a, b = np.broadcast_arrays(a, b)
    faithful = b > 0
    terms = np.where(faithful, 0.0, a / (1.0 - g))
    terms[faithful] = f_gamma(a[faithful] / b[faithful], g) * b[faithful]
    return float(np.sum(terms * data.overlap))


def quasi_entropy(omega: State, phi: State, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """``sum_ij f(alpha_i / beta_j) beta_j overlap_ij`` for a faithful ``phi``."""
    data = relative_modular_data(omega, phi)
    if np.any(data.betas <= tolerances().psd):
        raise ValueError("generic quasi-entropy needs a faithful (full-rank) phi")
    ratio = data.alphas[:, None] / data.betas[None, :]
    return float(np.sum(np.asarray(f(ratio)) * data.betas[None, :] * data.overlap))
