"""The gamma-family of relative entropies on block-diagonal algebras.

For ``0 < gamma < 1``::

    D_gamma(w, f) = (gamma tr w + (1 - gamma) tr f - Re tr(w**gamma f**(1-gamma)))
                    / (gamma (1 - gamma))

States need not be normalized. The endpoints are served by closed forms:
``D_0(w, f) = tr w - tr f + tr f (log f - log w)`` (``+inf`` unless
``supp f <= supp w``) and ``D_1(w, f) = D_0(f, w)``.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .algebra import HermitianElement, State, matrix_log_support, matrix_power, support_projection, trace_pairing
from .config import tolerances
from .embeddings import check_open_gamma, ell_gamma, pairing
from .errors import GammaOutOfRange, LengthMismatch, ShapeMismatch

__all__ = [
    "gamma_divergence",
    "relative_entropy_0",
    "relative_entropy_1",
    "divergence",
    "classical_gamma_divergence",
    "hasegawa_divergence",
    "overlap_trace",
    "cosine_residual",
    "parse_gamma_range",
    "divergence_sweep",
]

# Roundoff floor, in units of machine epsilon times the magnitude of the summed terms.
_NOISE_ULPS = 64.0


def _same_shape(a: HermitianElement, b: HermitianElement) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {list(a.shape)} and {list(b.shape)} differ")


def _clamp(value: float, magnitude: float) -> float:
    floor = _NOISE_ULPS * np.finfo(float).eps * magnitude
    if value < floor and value >= -(floor + tolerances().div_slack):
        return 0.0
    return float(value)


def overlap_trace(omega: State, phi: State, gamma: float) -> float:
    """``Re tr(omega**gamma phi**(1-gamma))`` as ``||omega**(gamma/2) phi**((1-gamma)/2)||_2**2``.

    The squared Frobenius norm equals the symmetrized trace
    ``tr(phi**((1-gamma)/2) omega**gamma phi**((1-gamma)/2))`` and is
    nonnegative in floating point.
    """
    _same_shape(omega, phi)
    a = matrix_power(omega, gamma / 2.0)
    b = matrix_power(phi, (1.0 - gamma) / 2.0)
    return float(sum(np.sum(np.abs(x @ y) ** 2) for x, y in zip(a.blocks, b.blocks)))


def gamma_divergence(omega: State, phi: State, gamma: float) -> float:
    g = check_open_gamma(gamma)
    _same_shape(omega, phi)
    tw, tf = omega.trace(), phi.trace()
    ov = overlap_trace(omega, phi, g)
    scale = g * (1.0 - g)
    value = (g * tw + (1.0 - g) * tf - ov) / scale
    return _clamp(value, (g * tw + (1.0 - g) * tf + ov) / scale)


def _support_contained(small: State, big: State) -> bool:
    """Whether supp(small) <= supp(big), via the weight ``small`` puts off supp(big)."""
    p = support_projection(big)
    leak = small.trace() - trace_pairing(p, small)
    return leak <= tolerances().psd * max(1.0, small.trace())


def relative_entropy_0(omega: State, phi: State) -> float:
    _same_shape(omega, phi)
    if not _support_contained(phi, omega):
        return math.inf
    tw, tf = omega.trace(), phi.trace()
    a = trace_pairing(matrix_log_support(phi), phi)
    b = trace_pairing(matrix_log_support(omega), phi)
    value = tw - tf + a - b
    return _clamp(value, tw + tf + abs(a) + abs(b))


def relative_entropy_1(omega: State, phi: State) -> float:
    return relative_entropy_0(phi, omega)


def divergence(omega: State, phi: State, gamma: float) -> float:
    """``D_gamma`` for any gamma in [0, 1], endpoints by closed form."""
    gamma = float(gamma)
    if gamma == 0.0:
        return relative_entropy_0(omega, phi)
    if gamma == 1.0:
        return relative_entropy_1(omega, phi)
    if not 0.0 < gamma < 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1], got {gamma}")
    return gamma_divergence(omega, phi, gamma)


def _weights(p) -> np.ndarray:
    w = np.asarray(p, dtype=float).ravel()
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("classical weights must be finite and nonnegative")
    return w


def classical_gamma_divergence(p, q, gamma: float) -> float:
    """Closed form on finite positive measures ``p`` and ``q``."""
    g = check_open_gamma(gamma)
    p, q = _weights(p), _weights(q)
    if p.shape != q.shape:
        raise LengthMismatch(f"lengths {p.size} and {q.size} differ")
    terms = g * p + (1.0 - g) * q - p ** g * q ** (1.0 - g)
    scale = g * (1.0 - g)
    value = float(np.sum(terms)) / scale
    return _clamp(value, float(np.sum(g * p + (1.0 - g) * q)) * 2.0 / scale)


def hasegawa_divergence(omega: State, phi: State, gamma: float) -> float:
    """``tr(rho_w - rho_w**gamma rho_f**(1-gamma)) / (gamma (1 - gamma))``.

    Only defined for normalized states; the product trace is formed
    directly, without the symmetrization used by :func:`gamma_divergence`.
    """
    g = check_open_gamma(gamma)
    _same_shape(omega, phi)
    for name, s in (("omega", omega), ("phi", phi)):
        if abs(s.trace() - 1.0) > 1e-9:
            raise ValueError(f"{name} must be normalized, trace is {s.trace()}")
    a = matrix_power(omega, g)
    b = matrix_power(phi, 1.0 - g)
    prod = sum(np.real(np.trace(x @ y)) for x, y in zip(a.blocks, b.blocks))
    return float((omega.trace() - prod) / (g * (1.0 - g)))


def cosine_residual(omega: State, phi: State, psi: State, gamma: float) -> float:
    """Defect of the generalized cosine identity; zero up to roundoff.

    ``D(w, f) + D(f, p) - D(w, p) - Re<l_g(w) - l_g(f), l_{1-g}(p) - l_{1-g}(f)>``
    """
    g = check_open_gamma(gamma)
    _same_shape(omega, phi)
    _same_shape(phi, psi)
    lhs = gamma_divergence(omega, phi, g) + gamma_divergence(phi, psi, g) - gamma_divergence(omega, psi, g)
    rhs = pairing(ell_gamma(omega, g) - ell_gamma(phi, g), ell_gamma(psi, 1.0 - g) - ell_gamma(phi, 1.0 - g))
    return float(lhs - rhs)


_RANGE = re.compile(r"^\s*([^:]+)(?::([^:]+)(?::([^:]+))?)?\s*$")


def parse_gamma_range(spec: str) -> np.ndarray:
    """Parse ``a:b:step`` (or a single ``a``) into a grid inside [0, 1].

    The grid runs ``a, a + step, ...`` up to and including ``b`` when ``b``
    lies on it (to 1e-9 of a step). Values are rounded to 12 decimals so
    that endpoints land exactly on 0 and 1.
    """
    m = _RANGE.match(spec)
    if not m:
        raise ValueError(f"bad gamma range {spec!r}")
    try:
        a = float(m.group(1))
        b = float(m.group(2)) if m.group(2) is not None else a
        step = float(m.group(3)) if m.group(3) is not None else 1.0
    except ValueError:
        raise ValueError(f"bad gamma range {spec!r}") from None
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError(f"gamma range must satisfy 0 <= a <= b <= 1, got {spec!r}")
    if not step > 0:
        raise ValueError(f"gamma step must be positive, got {step}")
    n = int(math.floor((b - a) / step + 1e-9))
    return np.round(a + step * np.arange(n + 1), 12)


def divergence_sweep(omega: State, phi: State, gammas) -> list[tuple[float, float]]:
    return [(float(g), divergence(omega, phi, float(g))) for g in gammas]
