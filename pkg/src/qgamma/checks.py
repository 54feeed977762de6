"""Randomized property checks and the acceptance suite.

Every check is deterministic given its seed: trial ``i`` draws from the
``i``-th child of ``numpy.random.SeedSequence(seed)``, so results do not
depend on evaluation order and a failing trial can be replayed alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import AlgebraShape, HermitianElement, State, random_hermitian, random_state, trace_pairing
from .bregman import fenchel_dual_estimate, frechet_derivative, generalized_bregman, standard_bregman
from .channels import ChannelSampler, apply_coarse_graining, duality_residual, random_channel
from .divergence import (
    classical_gamma_divergence,
    cosine_residual,
    gamma_divergence,
    relative_entropy_0,
)
from .embeddings import GammaVector, ell_gamma, psi_gamma, psi_gamma_gradient
from .errors import MaxIterationsWarning
from .projection import ConstraintSet, bregman_project, pythagorean_residual, two_start_distance
from .quasientropy import quasi_entropy_gamma

__all__ = [
    "CheckResult",
    "GAMMA_GRID",
    "CRITERIA",
    "SUITES",
    "run_criterion",
    "run_suite",
    "AUDIT_KINDS",
    "run_audit",
]

GAMMA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
DIMS = (2, 4, 8)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<28} worst={self.worst:.3e}  tol={self.tolerance:.1e}{extra}"


def _children(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _shape_for(dim: int, rng) -> AlgebraShape:
    """A full block most of the time, otherwise a random block split of ``dim``."""
    if dim == 1 or rng.uniform() < 0.7:
        return AlgebraShape((dim,))
    parts, left = [], dim
    while left:
        d = int(rng.integers(1, left + 1))
        parts.append(d)
        left -= d
    return AlgebraShape(tuple(parts))


def _random_pair(rng, dim, rank_deficient=False):
    shape = _shape_for(dim, rng)
    scale_w, scale_f = rng.uniform(0.5, 2.0, size=2)
    ranks = [None, None]
    if rank_deficient:
        which = int(rng.integers(0, 3))  # omega, phi, or both
        for k in (0, 1):
            if which in (k, 2):
                ranks[k] = max(1, int(rng.integers(1, max(dim, 2))))
    w = random_state(shape, rng, rank=ranks[0]) * scale_w
    f = random_state(shape, rng, rank=ranks[1]) * scale_f
    return State.from_element(w), State.from_element(f)


def _pair_grid(seed, pairs, rank_deficient_every=0):
    for i, rng in enumerate(_children(seed, pairs)):
        rd = bool(rank_deficient_every) and i % rank_deficient_every == 0
        yield i, _random_pair(rng, DIMS[i % len(DIMS)], rank_deficient=rd)


# acceptance criteria ---------------------------------------------------------

def check_special_cases(seed=0) -> CheckResult:
    p, q = np.array([0.5, 0.5]), np.array([0.75, 0.25])
    # scalar oracles written out term by term
    half_oracle = 4.0 * (1.0 - (math.sqrt(0.5 * 0.75) + math.sqrt(0.5 * 0.25)))
    kl_oracle = 0.75 * math.log(0.75 / 0.5) + 0.25 * math.log(0.25 / 0.5)
    sp, sq = State.from_weights(p), State.from_weights(q)
    errs = [
        abs(gamma_divergence(sp, sq, 0.5) - half_oracle),
        abs(classical_gamma_divergence(p, q, 0.5) - half_oracle),
        abs(relative_entropy_0(sp, sq) - kl_oracle),
    ]
    worst = max(errs)
    return CheckResult("special_cases", worst <= 1e-7, worst, 1e-7,
                       f"D_1/2={gamma_divergence(sp, sq, 0.5):.7f} D_0={relative_entropy_0(sp, sq):.7f}")


def check_index_duality(seed=0, pairs=1000) -> CheckResult:
    worst = 0.0
    for _, (w, f) in _pair_grid(seed, pairs):
        for g in GAMMA_GRID:
            worst = max(worst, abs(gamma_divergence(w, f, g) - gamma_divergence(f, w, 1.0 - g)))
    return CheckResult("index_duality", worst <= 1e-9, worst, 1e-9, f"{pairs} pairs x {len(GAMMA_GRID)} gammas")


def check_bregman_equivalence(seed=0, pairs=1000) -> CheckResult:
    worst = 0.0
    for _, (w, f) in _pair_grid(seed, pairs):
        for g in GAMMA_GRID:
            d = generalized_bregman(ell_gamma(w, g), ell_gamma(f, 1.0 - g))
            worst = max(worst, abs(d - gamma_divergence(w, f, g)))
    return CheckResult("bregman_equivalence", worst <= 1e-10, worst, 1e-10, f"{pairs} pairs x {len(GAMMA_GRID)} gammas")


def check_quasi_equivalence(seed=0, pairs=1000) -> CheckResult:
    worst = 0.0
    for _, (w, f) in _pair_grid(seed, pairs, rank_deficient_every=3):
        for g in GAMMA_GRID:
            worst = max(worst, abs(quasi_entropy_gamma(w, f, g) - gamma_divergence(w, f, g)))
    return CheckResult("quasi_equivalence", worst <= 1e-9, worst, 1e-9,
                       f"{pairs} pairs x {len(GAMMA_GRID)} gammas, every 3rd rank-deficient")


def _monotone_trial(rng):
    d_in = int(rng.integers(1, 5))
    d_out = int(rng.integers(1, 5))
    shape = _shape_for(d_in, rng)
    out_shape = _shape_for(d_out, rng)
    w, f = random_state(shape, rng), random_state(shape, rng)
    k = max(int(rng.integers(1, 5)), -(-shape.hilbert_dim // out_shape.hilbert_dim))
    T = random_channel(shape, out_shape, k, rng)
    g = float(rng.choice(GAMMA_GRID)) if rng.uniform() < 0.5 else float(rng.uniform(0.01, 0.99))
    return gamma_divergence(w, f, g) - gamma_divergence(apply_coarse_graining(T, w), apply_coarse_graining(T, f), g)


def check_markov_monotonicity(seed=0, trials=10_000) -> CheckResult:
    gaps = [_monotone_trial(rng) for rng in _children(seed, trials)]
    i = int(np.argmin(gaps))
    return CheckResult("markov_monotonicity", gaps[i] >= -1e-9, -min(gaps[i], 0.0), 1e-9,
                       f"{trials} tuples, min gap {gaps[i]:.3e} at trial {i}")


def check_channel_duality(seed=0, trials=1000) -> CheckResult:
    worst = 0.0
    for rng in _children(seed, trials):
        d_in, d_out = (int(v) for v in rng.integers(1, 9, size=2))
        ins, outs = _shape_for(d_in, rng), _shape_for(d_out, rng)
        k = max(int(rng.integers(1, 5)), -(-d_in // d_out))
        T = random_channel(ins, outs, k, rng)
        x = random_hermitian(outs, rng)
        rho = random_state(ins, rng)
        worst = max(worst, duality_residual(T, x, rho))
    return CheckResult("channel_duality", worst <= 1e-10, worst, 1e-10, f"{trials} triples")


def check_cosine_identity(seed=0, trials=1000) -> CheckResult:
    worst = 0.0
    for i, rng in enumerate(_children(seed, trials)):
        shape = _shape_for(DIMS[i % len(DIMS)], rng)
        w, f, p = (random_state(shape, rng) for _ in range(3))
        g = float(rng.uniform(0.05, 0.95))
        worst = max(worst, abs(cosine_residual(w, f, p, g)))
    return CheckResult("cosine_identity", worst <= 1e-9, worst, 1e-9, f"{trials} triples")


BOUNDARY_GAMMAS = (1e-2, 1e-3, 1e-4)
BOUNDARY_SLOPE = 50.0


def check_boundary_limit(seed=0, pairs=60) -> CheckResult:
    """``|D_g - D_0| <= C g`` at three small gammas, plus a Richardson limit.

    The linear extrapolation from the two smallest gammas must hit the
    closed-form ``D_0`` within 1e-4. ``C`` is pinned at ``BOUNDARY_SLOPE``
    for normalized full-rank states of dimension <= 4.
    """
    worst_extrap, worst_slope = 0.0, 0.0
    for i, rng in enumerate(_children(seed, pairs)):
        shape = _shape_for((2, 3, 4)[i % 3], rng)
        w, f = random_state(shape, rng), random_state(shape, rng)
        d0 = relative_entropy_0(w, f)
        vals = [gamma_divergence(w, f, g) for g in BOUNDARY_GAMMAS]
        for g, v in zip(BOUNDARY_GAMMAS, vals):
            worst_slope = max(worst_slope, abs(v - d0) / g)
        g1, g2 = BOUNDARY_GAMMAS[1], BOUNDARY_GAMMAS[2]
        extrap = (g1 * vals[2] - g2 * vals[1]) / (g1 - g2)
        worst_extrap = max(worst_extrap, abs(extrap - d0))
    passed = worst_extrap <= 1e-4 and worst_slope <= BOUNDARY_SLOPE
    return CheckResult("boundary_limit", passed, worst_extrap, 1e-4,
                       f"max |D_g - D_0|/g = {worst_slope:.3f} (C = {BOUNDARY_SLOPE:g})")


def check_hilbert_case(seed=0, pairs=300) -> CheckResult:
    worst = 0.0
    for i, (w, f) in _pair_grid(seed, pairs, rank_deficient_every=4):
        diff = ell_gamma(w, 0.5) * 0.5 - ell_gamma(f, 0.5) * 0.5  # sqrt(rho_w) - sqrt(rho_f)
        worst = max(worst, abs(gamma_divergence(w, f, 0.5) - 2.0 * diff.norm() ** 2))
        rng = np.random.default_rng([seed, i])
        x = GammaVector.from_element(0.5, random_hermitian(w.shape, rng))
        y = ell_gamma(f, 0.5)
        worst = max(worst, abs(standard_bregman(x, y) - 0.5 * (x - y).norm() ** 2))
    return CheckResult("hilbert_case", worst <= 1e-10, worst, 1e-10, f"{pairs} pairs")


def check_projection(seed=0) -> CheckResult:
    psi = State.from_weights([0.8, 0.2])
    a = HermitianElement([1, 1], [[[1.0]], [[-1.0]]])
    C = ConstraintSet(0.5, ((a, 0.0),))
    res = bregman_project(psi, C)
    coord_err = float(np.max(np.abs(res.projected.weights() - 0.45)))
    div_err = abs(res.divergence - 0.2)
    pyth = abs(pythagorean_residual(State.from_weights([0.2, 0.2]), res.projected, psi, 0.5))
    uniq = two_start_distance(psi, C, seed=seed)
    passed = coord_err <= 1e-6 and div_err <= 1e-6 and pyth <= 1e-6 and uniq <= 1e-6
    return CheckResult("projection", passed, max(coord_err, div_err, pyth, uniq), 1e-6,
                       f"projected={np.round(res.projected.weights(), 9).tolist()} D={res.divergence:.9f} "
                       f"pyth={pyth:.1e} two-start={uniq:.1e}")


def check_fenchel_conjugate(seed=0, samples=36) -> CheckResult:
    """Cold-started ascent (from x = 0) recovers ``phi(1)/gamma``."""
    worst = 0.0
    for i, rng in enumerate(_children(seed, samples)):
        g = GAMMA_GRID[i % len(GAMMA_GRID)]
        shape = _shape_for(1 + i % 4, rng)
        phi = State.from_element(random_state(shape, rng) * float(rng.uniform(0.5, 2.0)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MaxIterationsWarning)
            est = fenchel_dual_estimate(ell_gamma(phi, 1.0 - g), start="zero")
        worst = max(worst, abs(est.value - phi.trace() / g))
    return CheckResult("fenchel_conjugate", worst <= 1e-6, worst, 1e-6, f"{samples} states, dims 1-4")


def check_gradient(seed=0, samples=90, step=1e-5) -> CheckResult:
    """Central differences of Psi_gamma against ``Re<y, f(x)>``.

    Relative error is measured against ``max(|analytic|, 1e-3 ||f(x)|| ||y||)``
    so a direction nearly orthogonal to the gradient does not divide by ~0.
    """
    worst = 0.0
    for i, rng in enumerate(_children(seed, samples)):
        g = GAMMA_GRID[i % len(GAMMA_GRID)]
        shape = _shape_for(1 + i % 4, rng)
        x = ell_gamma(random_state(shape, rng), g)
        y = random_hermitian(shape, rng)
        an = frechet_derivative(x, y)
        plus = GammaVector.from_element(g, x + step * y)
        minus = GammaVector.from_element(g, x - step * y)
        fd = (psi_gamma(plus) - psi_gamma(minus)) / (2.0 * step)
        denom = max(abs(an), 1e-3 * psi_gamma_gradient(x).norm() * y.norm())
        worst = max(worst, abs(fd - an) / denom)
    return CheckResult("gradient_check", worst <= 1e-5, worst, 1e-5, f"{samples} points, h={step:g}")


CRITERIA: dict[str, tuple[str, Callable[..., CheckResult]]] = {
    "special_cases": ("divergence", check_special_cases),
    "index_duality": ("divergence", check_index_duality),
    "bregman_equivalence": ("bregman", check_bregman_equivalence),
    "quasi_equivalence": ("quasi", check_quasi_equivalence),
    "markov_monotonicity": ("channels", check_markov_monotonicity),
    "channel_duality": ("channels", check_channel_duality),
    "cosine_identity": ("divergence", check_cosine_identity),
    "boundary_limit": ("divergence", check_boundary_limit),
    "hilbert_case": ("divergence", check_hilbert_case),
    "projection": ("projection", check_projection),
    "fenchel_conjugate": ("bregman", check_fenchel_conjugate),
    "gradient_check": ("bregman", check_gradient),
}

SUITES = ("all",) + tuple(sorted({s for s, _ in CRITERIA.values()}))


def run_criterion(name: str, seed=0) -> CheckResult:
    return CRITERIA[name][1](seed=seed)


def run_suite(suite: str = "all", seed=0) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return [fn(seed=seed) for name, (s, fn) in CRITERIA.items() if suite in ("all", s)]


# audits --------------------------------------------------------------------

@dataclass(frozen=True)
class AuditOutcome:
    kind: str
    trials: int
    worst: float
    worst_trial: int
    tolerance: float
    passed: bool


def _audit_monotone(rng, dim, gamma):
    shape = AlgebraShape((dim,))
    w, f = random_state(shape, rng), random_state(shape, rng)
    T = ChannelSampler(shape).sample(rng)
    # report the violation as a positive number
    gap = gamma_divergence(w, f, gamma) - gamma_divergence(apply_coarse_graining(T, w), apply_coarse_graining(T, f), gamma)
    return -gap


def _audit_convexity(rng, dim, gamma):
    shape = AlgebraShape((dim,))
    w1, w2, f1, f2 = (random_state(shape, rng) for _ in range(4))
    lam = float(rng.uniform())
    mixed = gamma_divergence(w1.mix(w2, lam), f1.mix(f2, lam), gamma)
    return mixed - (lam * gamma_divergence(w1, f1, gamma) + (1 - lam) * gamma_divergence(w2, f2, gamma))


def _audit_duality(rng, dim, gamma):
    shape = AlgebraShape((dim,))
    T = ChannelSampler(shape).sample(rng)
    return duality_residual(T, random_hermitian(shape, rng), random_state(shape, rng))


def _audit_index(rng, dim, gamma):
    w, f = random_state(dim, rng), random_state(dim, rng)
    return abs(gamma_divergence(w, f, gamma) - gamma_divergence(f, w, 1.0 - gamma))


def _audit_cosine(rng, dim, gamma):
    w, f, p = (random_state(dim, rng) for _ in range(3))
    return abs(cosine_residual(w, f, p, gamma))


def _audit_quasi(rng, dim, gamma):
    rank = int(rng.integers(1, dim + 1))
    w, f = random_state(dim, rng, rank=rank), random_state(dim, rng)
    return abs(quasi_entropy_gamma(w, f, gamma) - gamma_divergence(w, f, gamma))


def _audit_pythagoras(rng, dim, gamma):
    shape = AlgebraShape((dim,))
    inner = random_state(shape, rng)
    x0 = ell_gamma(inner, gamma)
    a = random_hermitian(shape, rng)
    one = HermitianElement.identity(shape)
    C = ConstraintSet(gamma, ((a, trace_pairing(a, x0)), (one, trace_pairing(one, x0))))
    psi = random_state(shape, rng)
    res = bregman_project(psi, C)
    # inner is feasible by construction, so the identity holds at an interior projection
    return abs(pythagorean_residual(inner, res.projected, psi, gamma))


AUDIT_KINDS: dict[str, tuple[Callable, float]] = {
    "monotone": (_audit_monotone, 1e-9),
    "convexity": (_audit_convexity, 1e-9),
    "duality": (_audit_duality, 1e-10),
    "index": (_audit_index, 1e-9),
    "cosine": (_audit_cosine, 1e-9),
    "quasi": (_audit_quasi, 1e-9),
    "pythagoras": (_audit_pythagoras, 1e-6),
}


def run_audit(kind: str, trials: int, dim: int, seed=0, gamma: float = 0.5) -> AuditOutcome:
    """Worst residual over ``trials`` random draws; residuals are violations (<= tol passes)."""
    if kind not in AUDIT_KINDS:
        raise ValueError(f"unknown audit kind {kind!r}")
    if trials < 1 or dim < 1:
        raise ValueError("trials and dim must be >= 1")
    fn, tol = AUDIT_KINDS[kind]
    vals = [fn(rng, dim, gamma) for rng in _children(seed, trials)]
    i = int(np.argmax(vals))
    return AuditOutcome(kind, trials, float(vals[i]), i, tol, bool(vals[i] <= tol))
