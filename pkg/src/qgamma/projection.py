"""Bregman projection onto sets that are affine in gamma-coordinates.

The projection of ``psi`` onto ``C = {omega : Re<l_g(omega), a_k> = c_k}`` is
found in the coordinate ``x = l_g(omega)``, where the objective

    F(x) = Psi_g(x) - Re<x, l_{1-g}(psi)> + Psi_{1-g}(l_{1-g}(psi))

is convex, equals ``D_g(omega, psi)`` on the positive cone, and has gradient
``f(x) - l_{1-g}(psi)``. The feasible set is the affine subspace intersected
with the positive cone. The solver is projected gradient with
Barzilai-Borwein steps and Armijo backtracking; the Euclidean projection
onto the intersection is computed by Dykstra's algorithm (affine
least-squares projection alternating with eigenvalue clipping).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraShape, HermitianElement, State, as_rng, trace_distance
from .config import tolerances
from .divergence import gamma_divergence
from .embeddings import GammaVector, check_open_gamma, ell_gamma, ell_gamma_inverse
from .errors import Infeasible, MaxIterationsWarning, SamplingFailed, ShapeMismatch

__all__ = [
    "ConstraintSet",
    "ProjectionResult",
    "bregman_project",
    "optimality_residuals",
    "pythagorean_residual",
    "two_start_distance",
]

AFFINE_TOL = 1e-8


@dataclass(frozen=True)
class ConstraintSet:
    """Affine constraints ``Re<x, a_k> = c_k`` on ``x = l_gamma(omega)``."""

    gamma: float
    constraints: tuple[tuple[HermitianElement, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "gamma", check_open_gamma(self.gamma))
        pairs = tuple((a, float(c)) for a, c in self.constraints)
        if not pairs:
            raise ValueError("a constraint set needs at least one constraint")
        shape = pairs[0][0].shape
        for a, _ in pairs:
            if a.shape != shape:
                raise ShapeMismatch("all constraint matrices must share one shape")
        object.__setattr__(self, "constraints", pairs)

    @property
    def shape(self) -> AlgebraShape:
        return self.constraints[0][0].shape

    def residuals(self, x: HermitianElement) -> np.ndarray:
        return np.array([_inner(x.blocks, a.blocks) - c for a, c in self.constraints])


@dataclass(frozen=True)
class ProjectionResult:
    projected: State
    coordinate: GammaVector
    divergence: float
    iterations: int
    kkt_residual: float
    feasibility_residual: float
    converged: bool
    objective_history: tuple[float, ...]


# block-list helpers ---------------------------------------------------------

def _inner(a, b) -> float:
    return float(sum(np.real(np.vdot(y, x)) for x, y in zip(a, b)))


def _norm(a) -> float:
    return float(np.sqrt(sum(np.sum(np.abs(x) ** 2) for x in a)))


def _axpy(alpha, x, y):
    return [alpha * u + v for u, v in zip(x, y)]


def _clip_psd(blocks):
    out, min_eig = [], np.inf
    for b in blocks:
        lam, v = np.linalg.eigh(b)
        min_eig = min(min_eig, lam[0])
        out.append((v * np.clip(lam, 0.0, None)) @ v.conj().T)
    return out, min_eig


def _min_eig(blocks) -> float:
    return float(min(np.linalg.eigvalsh(b)[0] for b in blocks))


class _Affine:
    """Least-squares projection onto ``{x : <x, a_k> = c_k}``."""

    def __init__(self, C: ConstraintSet):
        self.a = [[np.asarray(b) for b in a.blocks] for a, _ in C.constraints]
        self.c = np.array([c for _, c in C.constraints])
        gram = np.array([[_inner(p, q) for q in self.a] for p in self.a])
        self.gram_pinv = np.linalg.pinv(gram, rcond=1e-12)
        mu = self.gram_pinv @ self.c
        consistency = np.max(np.abs(gram @ mu - self.c))
        if consistency > AFFINE_TOL * max(1.0, np.max(np.abs(self.c))):
            raise Infeasible(f"affine constraints are inconsistent (residual {consistency:.3e})")
        self.scale = max(1.0, float(np.max(np.abs(self.c))))

    def values(self, x) -> np.ndarray:
        return np.array([_inner(x, a) for a in self.a])

    def residual(self, x) -> float:
        return float(np.max(np.abs(self.values(x) - self.c)))

    def project(self, x, homogeneous: bool = False):
        rhs = self.values(x) - (0.0 if homogeneous else self.c)
        lam = self.gram_pinv @ rhs
        out = [u.copy() for u in x]
        for coef, a in zip(lam, self.a):
            for u, b in zip(out, a):
                u -= coef * b
        return out


def _project_feasible(z, aff: _Affine, dykstra: bool, max_inner: int):
    """Euclidean projection of ``z`` onto affine set intersected with the PSD cone.

    Returns ``(point, affine_residual)``. The point is PSD; when the affine
    projection of ``z`` is already PSD it is returned directly (exact).
    """
    y = aff.project(z)
    if _min_eig(y) >= 0.0:
        return y, aff.residual(y)
    x = [u.copy() for u in z]
    q = [np.zeros_like(u) for u in z]
    history = []
    for _ in range(max_inner):
        y = aff.project(x)
        if dykstra:
            xn, _ = _clip_psd(_axpy(1.0, y, q))
            q = [u + v - w for u, v, w in zip(y, q, xn)]
        else:
            xn, _ = _clip_psd(y)
        step = _norm([u - v for u, v in zip(xn, x)])
        x = xn
        res = aff.residual(x)
        history.append(res)
        if step <= 1e-15 * max(1.0, _norm(x)) and res <= 1e-13 * aff.scale:
            break
        # stalled at a positive distance: the intersection is (numerically) empty
        if len(history) > 100 and res > AFFINE_TOL * aff.scale and history[-101] - res <= 1e-3 * res:
            break
    # polish onto the affine set when that keeps the point PSD
    y = aff.project(x)
    if _min_eig(y) >= -tolerances().psd:
        x, _ = _clip_psd(y)
    return x, aff.residual(x)


def _psi_blocks(x, g) -> float:
    total = sum(np.sum((g * np.abs(np.linalg.eigvalsh(b))) ** (1.0 / g)) for b in x)
    return float(total / (1.0 - g))


def _grad_blocks(x, g):
    e = (1.0 - g) / g
    out = []
    for b in x:
        lam, v = np.linalg.eigh(b)
        out.append((v * (np.sign(lam) * (g * np.abs(lam)) ** e / (1.0 - g))) @ v.conj().T)
    return out


def bregman_project(
    psi: State,
    C: ConstraintSet,
    tol: float | None = None,
    max_iter: int = 10_000,
    start: str | GammaVector = "psi",
    seed=0,
    dykstra: bool = True,
    max_inner: int = 500,
) -> ProjectionResult:
    """Minimize ``D_gamma(omega, psi)`` over ``omega`` in ``C``.

    ``start`` is ``"psi"`` (projection of ``l_gamma(psi)``), ``"random"``
    (projection of a random positive point drawn from ``seed``) or an
    explicit coordinate. Raises :class:`Infeasible` when the constraints
    are inconsistent or miss the positive cone. Hitting ``max_iter``
    warns and returns the best iterate with ``converged=False``.
    """
    g = C.gamma
    if psi.shape != C.shape:
        raise ShapeMismatch(f"state shape {list(psi.shape)} != constraint shape {list(C.shape)}")
    tol = tolerances().solver if tol is None else tol
    aff = _Affine(C)
    target = [np.asarray(b) for b in ell_gamma(psi, 1.0 - g).blocks]
    const = psi.trace() / g

    def F(x):
        return _psi_blocks(x, g) - _inner(x, target) + const

    def grad(x):
        return [u - t for u, t in zip(_grad_blocks(x, g), target)]

    def proj(z, inner=max_inner):
        return _project_feasible(z, aff, dykstra, inner)

    if isinstance(start, GammaVector):
        z0 = [np.array(b) for b in start.blocks]
    elif start == "psi":
        z0 = [np.array(b) for b in ell_gamma(psi, g).blocks]
    elif start == "random":
        rng = as_rng(seed)
        z0 = []
        for d in psi.shape.blocks:
            m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            z0.append(m @ m.conj().T / d)
    else:
        raise ValueError(f"unknown start {start!r}")

    x, feas = proj(z0, inner=20 * max_inner)
    if feas > AFFINE_TOL * aff.scale:
        raise Infeasible(f"constraints do not meet the positive cone (residual {feas:.3e})")

    fx, gx = F(x), grad(x)

    def kkt(x, gx):
        p, _ = proj(_axpy(-1.0, gx, x))
        return _norm([u - v for u, v in zip(x, p)])

    pg = kkt(x, gx)
    history = [fx]
    step = 1.0
    it = 0
    while pg > tol and it < max_iter:
        it += 1
        while True:
            xn, _ = proj(_axpy(-step, gx, x))
            d = [u - v for u, v in zip(xn, x)]
            fn, gn = F(xn), grad(xn)
            # F is convex along the segment, so a nonpositive slope at its end
            # certifies descent even when F differences are below roundoff
            if fn <= fx + min(0.0, 1e-4 * _inner(gx, d)) or _inner(gn, d) <= 0.0:
                break
            step *= 0.5
            if step < 1e-20:
                break
        if step < 1e-20:
            break
        yk = [u - v for u, v in zip(gn, gx)]
        sy = _inner(d, yk)
        if sy > 0:
            step = min(max(_inner(d, d) / sy, 1e-10), 1e10)
        else:
            step = min(step * 2.0, 1e10)
        x, fx, gx = xn, fn, gn
        history.append(fx)
        pg = kkt(x, gx)

    converged = pg <= tol
    if not converged:
        warnings.warn(f"Bregman projection stopped after {it} iterations, KKT residual {pg:.3e}",
                      MaxIterationsWarning, stacklevel=2)
    coord = GammaVector(g, psi.shape, x, check=False)
    omega = ell_gamma_inverse(coord)
    return ProjectionResult(
        projected=omega,
        coordinate=coord,
        divergence=gamma_divergence(omega, psi, g),
        iterations=it,
        kkt_residual=float(pg),
        feasibility_residual=max(aff.residual(x), max(0.0, -_min_eig(x))),
        converged=converged,
        objective_history=tuple(history),
    )


def pythagorean_residual(r: State, xbar: State, y: State, gamma: float) -> float:
    """``D(r, xbar) + D(xbar, y) - D(r, y)``; vanishes at a projection when ``r`` is in C."""
    return gamma_divergence(r, xbar, gamma) + gamma_divergence(xbar, y, gamma) - gamma_divergence(r, y, gamma)


def optimality_residuals(result: ProjectionResult, psi: State, C: ConstraintSet,
                         samples: int = 32, seed=0) -> list[float]:
    """Residuals ``D(w, psi) - D(p, psi) - D_{1-g}(p, w)`` at sampled feasible ``w``.

    ``p`` is the projection. Samples move from ``p`` along random directions
    in the null space of the constraints, shortened until positive. All
    residuals are nonnegative at a true minimizer. Raises
    :class:`SamplingFailed` when no admissible sample exists (e.g. ``C`` is
    a single point).
    """
    g = C.gamma
    rng = as_rng(seed)
    aff = _Affine(C)
    xbar = [np.asarray(b) for b in result.coordinate.blocks]
    scale = max(_norm(xbar), 1e-12)
    base = gamma_divergence(result.projected, psi, g)
    out = []
    for _ in range(samples):
        h = []
        for d in psi.shape.blocks:
            m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            h.append(0.5 * (m + m.conj().T))
        h = aff.project(h, homogeneous=True)
        hn = _norm(h)
        if hn <= 1e-12:
            continue
        h = [u * (scale / hn) for u in h]
        t = 1.0
        for _ in range(60):
            cand = _axpy(t, h, xbar)
            if _min_eig(cand) >= 0.0:
                break
            t *= 0.5
        else:
            continue
        cand = _axpy(t * rng.uniform(0.05, 1.0), h, xbar)
        w = ell_gamma_inverse(GammaVector(g, psi.shape, cand, check=False))
        out.append(gamma_divergence(w, psi, g) - base - gamma_divergence(result.projected, w, 1.0 - g))
    if not out:
        raise SamplingFailed("no feasible perturbation of the projection could be sampled")
    return out


def two_start_distance(psi: State, C: ConstraintSet, seed=0, **kw) -> float:
    """Trace distance between projections started from ``psi`` and from a random point."""
    a = bregman_project(psi, C, start="psi", **kw)
    b = bregman_project(psi, C, start="random", seed=seed, **kw)
    return trace_distance(a.projected, b.projected)
