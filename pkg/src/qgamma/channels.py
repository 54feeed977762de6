"""Markov maps, their dual coarse-grainings, and monotonicity audits.

A channel is stored by Kraus operators ``K_i`` acting on the full direct-sum
Hilbert spaces, each of shape ``(d_out, d_in)``. It acts in two pictures:

* Heisenberg (Markov map) ``T(x) = sum_i K_i^dagger x K_i`` on observables
  of the output algebra, giving observables of the input algebra;
* Schrodinger (coarse-graining) ``T*(rho) = sum_i K_i rho K_i^dagger``.

Both outputs are cut back to the block-diagonal of the target algebra,
which is exact for block-respecting channels and otherwise composes the
channel with the block pinching. ``T`` is unital exactly when ``T*``
preserves the trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraShape, HermitianElement, State, as_rng, random_state, trace_pairing
from .divergence import gamma_divergence
from .errors import ShapeMismatch

__all__ = [
    "Channel",
    "apply_markov",
    "apply_coarse_graining",
    "duality_residual",
    "choi_matrix",
    "random_channel",
    "pinching_channel",
    "identity_channel",
    "unitary_channel",
    "ChannelSampler",
    "AuditReport",
    "monotonicity_audit",
]

CHANNEL_TOL = 1e-10


def _cut_blocks(shape: AlgebraShape, m: np.ndarray) -> list[np.ndarray]:
    return [m[o:o + d, o:o + d] for o, d in zip(shape.offsets, shape.blocks)]


def _embed(x: HermitianElement) -> np.ndarray:
    return x.to_dense()


@dataclass(frozen=True)
class Channel:
    in_shape: AlgebraShape
    out_shape: AlgebraShape
    kraus: tuple[np.ndarray, ...]
    unital: bool = field(init=False)
    trace_preserving: bool = field(init=False)

    def __post_init__(self):
        ins, outs = AlgebraShape.of(self.in_shape), AlgebraShape.of(self.out_shape)
        object.__setattr__(self, "in_shape", ins)
        object.__setattr__(self, "out_shape", outs)
        if len(self.kraus) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        ks = []
        for i, k in enumerate(self.kraus):
            a = np.array(k, dtype=np.complex128)
            if a.shape != (outs.hilbert_dim, ins.hilbert_dim):
                raise ShapeMismatch(
                    f"Kraus operator {i} has shape {a.shape}, expected {(outs.hilbert_dim, ins.hilbert_dim)}"
                )
            a.setflags(write=False)
            ks.append(a)
        object.__setattr__(self, "kraus", tuple(ks))
        object.__setattr__(self, "unital", self._check_unital())
        object.__setattr__(self, "trace_preserving", self._check_trace_preserving())

    def _check_unital(self) -> bool:
        """Heisenberg side: ``T(1) == 1``."""
        one = apply_markov(self, HermitianElement.identity(self.out_shape))
        return bool(one.allclose(HermitianElement.identity(self.in_shape), atol=CHANNEL_TOL))

    def _check_trace_preserving(self) -> bool:
        """Schrodinger side: ``tr T*(E_jk) == delta_jk`` on every matrix unit of the input algebra."""
        # tr(K E_jk K^dagger) = sum_r K[r, j] conj(K[r, k])
        traces = sum(K.T @ K.conj() for K in self.kraus)
        for o, d in zip(self.in_shape.offsets, self.in_shape.blocks):
            if not np.allclose(traces[o:o + d, o:o + d], np.eye(d), rtol=0.0, atol=CHANNEL_TOL):
                return False
        return True

    def compose(self, other: "Channel") -> "Channel":
        """Coarse-graining ``self* o other*`` (apply ``other`` first)."""
        if other.out_shape != self.in_shape:
            raise ShapeMismatch("channel shapes do not chain")
        ks = [a @ b for a in self.kraus for b in other.kraus]
        return Channel(other.in_shape, self.out_shape, tuple(ks))


def _schrodinger_dense(T: "Channel", m: np.ndarray) -> np.ndarray:
    return sum(K @ m @ K.conj().T for K in T.kraus)


def apply_markov(T: Channel, x: HermitianElement) -> HermitianElement:
    """Heisenberg action on an observable of the output algebra."""
    if x.shape != T.out_shape:
        raise ShapeMismatch(f"observable shape {list(x.shape)} != channel output {list(T.out_shape)}")
    xd = _embed(x)
    m = sum(K.conj().T @ xd @ K for K in T.kraus)
    return HermitianElement(T.in_shape, _cut_blocks(T.in_shape, m), check=False)


def apply_coarse_graining(T: Channel, rho: State) -> State:
    """Schrodinger action on a state of the input algebra."""
    if rho.shape != T.in_shape:
        raise ShapeMismatch(f"state shape {list(rho.shape)} != channel input {list(T.in_shape)}")
    m = _schrodinger_dense(T, _embed(rho))
    return State(T.out_shape, _cut_blocks(T.out_shape, m), check=False)


def duality_residual(T: Channel, x: HermitianElement, rho: State) -> float:
    """``|<T(x), rho> - <x, T*(rho)>|``."""
    return abs(trace_pairing(apply_markov(T, x), rho) - trace_pairing(x, apply_coarse_graining(T, rho)))


def choi_matrix(T: Channel) -> np.ndarray:
    """``sum_jk E_jk (x) T*(E_jk)`` over the full input space, before block cutting."""
    n_in, n_out = T.in_shape.hilbert_dim, T.out_shape.hilbert_dim
    choi = np.zeros((n_in * n_out, n_in * n_out), dtype=np.complex128)
    for j in range(n_in):
        for k in range(n_in):
            e = np.zeros((n_in, n_in))
            e[j, k] = 1.0
            choi[j * n_out:(j + 1) * n_out, k * n_out:(k + 1) * n_out] = _schrodinger_dense(T, e)
    return choi


def random_channel(in_shape, out_shape, kraus_count: int, seed=0) -> Channel:
    """Random trace-preserving channel from a Ginibre isometry.

    The isometry ``V`` (``kraus_count * d_out`` by ``d_in``, orthonormal
    columns from a QR factorization) is sliced into Kraus operators, so
    ``sum_i K_i^dagger K_i = V^dagger V = 1``.
    """
    ins, outs = AlgebraShape.of(in_shape), AlgebraShape.of(out_shape)
    if kraus_count < 1:
        raise ValueError("kraus_count must be >= 1")
    d_in, d_out = ins.hilbert_dim, outs.hilbert_dim
    if kraus_count * d_out < d_in:
        raise ValueError(f"need kraus_count * d_out >= d_in, got {kraus_count} * {d_out} < {d_in}")
    rng = as_rng(seed)
    g = rng.standard_normal((kraus_count * d_out, d_in)) + 1j * rng.standard_normal((kraus_count * d_out, d_in))
    q, r = np.linalg.qr(g)
    # fix the phase freedom of QR so the draw is Haar distributed
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    ks = tuple(q[i * d_out:(i + 1) * d_out, :] for i in range(kraus_count))
    return Channel(ins, outs, ks)


def pinching_channel(shape) -> Channel:
    """Conditional expectation onto the diagonal: Kraus operators ``|i><i|``."""
    shape = AlgebraShape.of(shape)
    n = shape.hilbert_dim
    ks = []
    for i in range(n):
        p = np.zeros((n, n))
        p[i, i] = 1.0
        ks.append(p)
    return Channel(shape, shape, tuple(ks))


def identity_channel(shape) -> Channel:
    shape = AlgebraShape.of(shape)
    return Channel(shape, shape, (np.eye(shape.hilbert_dim),))


def unitary_channel(shape, u) -> Channel:
    shape = AlgebraShape.of(shape)
    return Channel(shape, shape, (np.asarray(u, dtype=np.complex128),))


@dataclass(frozen=True)
class ChannelSampler:
    """Draws random channels from ``in_shape`` to ``out_shape``.

    ``kraus_count=None`` draws the count uniformly from 1..``max_kraus``,
    bumped up when needed so an isometry exists.
    """

    in_shape: AlgebraShape
    out_shape: AlgebraShape | None = None
    kraus_count: int | None = None
    max_kraus: int = 4

    def sample(self, seed) -> Channel:
        rng = as_rng(seed)
        ins = AlgebraShape.of(self.in_shape)
        outs = ins if self.out_shape is None else AlgebraShape.of(self.out_shape)
        k = self.kraus_count if self.kraus_count is not None else int(rng.integers(1, self.max_kraus + 1))
        k = max(k, -(-ins.hilbert_dim // outs.hilbert_dim))
        return random_channel(ins, outs, k, rng)


@dataclass(frozen=True)
class AuditReport:
    gamma: float
    trials: int
    min_gap: float
    worst_trial: int
    gaps: tuple[float, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.min_gap >= -self.tolerance


def monotonicity_audit(omega: State, phi: State, gamma: float, sampler: ChannelSampler | Channel,
                       trials: int = 1, seed=0, tolerance: float = 1e-9) -> AuditReport:
    """Check ``D(w, f) >= D(T* w, T* f)`` over sampled channels.

    Each trial draws its channel from a seed spawned off ``seed``, so the
    report does not depend on evaluation order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = gamma_divergence(omega, phi, gamma)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    gaps = []
    for s in seeds:
        T = sampler if isinstance(sampler, Channel) else sampler.sample(np.random.default_rng(s))
        after = gamma_divergence(apply_coarse_graining(T, omega), apply_coarse_graining(T, phi), gamma)
        gaps.append(base - after)
    worst = int(np.argmin(gaps))
    return AuditReport(gamma=float(gamma), trials=trials, min_gap=float(gaps[worst]), worst_trial=worst,
                       gaps=tuple(gaps), tolerance=tolerance)


def random_state_pair(shape, seed=0):
    rng = as_rng(seed)
    return random_state(shape, rng), random_state(shape, rng)
