"""Finite-dimensional block-diagonal *-algebras and their states.

An algebra is a direct sum of full matrix blocks ``M_{d1} + M_{d2} + ...``.
Elements are stored block by block; a commutative algebra is the case
where every block is 1x1, so classical weight vectors and density
matrices go through the same code.

All matrix functions are computed from one primitive, the per-block
Hermitian eigendecomposition (``numpy.linalg.eigh``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from numbers import Integral, Real
from typing import Callable, Sequence

import numpy as np

from .config import tolerances
from .errors import NonHermitian, NotPositive, ShapeMismatch

__all__ = [
    "AlgebraShape",
    "HermitianElement",
    "State",
    "SpectralDecomposition",
    "spectral",
    "apply_spectral",
    "matrix_power",
    "matrix_log_support",
    "support_projection",
    "trace_pairing",
    "trace_norm",
    "trace_distance",
    "random_state",
    "random_hermitian",
    "as_rng",
]


@dataclass(frozen=True)
class AlgebraShape:
    """Block dimensions of a direct sum of full matrix algebras."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("an algebra shape needs at least one block")
        for d in blocks:
            if not isinstance(d, Integral) or isinstance(d, bool) or d < 1:
                raise ValueError(f"block dimensions must be integers >= 1, got {d!r}")
        object.__setattr__(self, "blocks", tuple(int(d) for d in blocks))

    @classmethod
    def of(cls, spec) -> "AlgebraShape":
        """Coerce an int (one full block), a sequence of ints, or a shape."""
        if isinstance(spec, AlgebraShape):
            return spec
        if isinstance(spec, Integral):
            return cls((int(spec),))
        return cls(tuple(spec))

    @classmethod
    def classical(cls, n: int) -> "AlgebraShape":
        return cls((1,) * n)

    @property
    def hilbert_dim(self) -> int:
        return sum(self.blocks)

    @property
    def algebra_dim(self) -> int:
        return sum(d * d for d in self.blocks)

    @property
    def is_commutative(self) -> bool:
        return all(d == 1 for d in self.blocks)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.blocks:
            out.append(acc)
            acc += d
        return tuple(out)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Per-block eigenvalues (ascending) and orthonormal eigenvector columns."""

    eigenvalues: tuple[np.ndarray, ...]
    eigenvectors: tuple[np.ndarray, ...]

    def all_eigenvalues(self) -> np.ndarray:
        return np.concatenate(self.eigenvalues)

    def reconstruct(self, fn: Callable[[np.ndarray], np.ndarray] | None = None):
        """Blocks ``V fn(L) V^dagger``; ``fn`` defaults to the identity."""
        out = []
        for lam, vec in zip(self.eigenvalues, self.eigenvectors):
            mapped = lam if fn is None else fn(lam)
            out.append((vec * mapped) @ vec.conj().T)
        return out


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class HermitianElement:
    """Self-adjoint element of a block-diagonal algebra.

    Blocks are checked for Hermiticity (relative tolerance) and stored
    symmetrized and read-only. Arithmetic with other elements of the same
    shape and with real scalars is supported.
    """

    def __init__(self, shape, blocks: Sequence, *, check: bool = True):
        shape = AlgebraShape.of(shape)
        if len(blocks) != len(shape.blocks):
            raise ShapeMismatch(
                f"shape {list(shape.blocks)} needs {len(shape.blocks)} blocks, got {len(blocks)}"
            )
        herm_tol = tolerances().herm
        stored = []
        for i, (d, b) in enumerate(zip(shape.blocks, blocks)):
            a = np.array(b, dtype=np.complex128)
            if a.ndim == 0:
                a = a.reshape(1, 1)
            if a.shape != (d, d):
                raise ShapeMismatch(f"block {i} has shape {a.shape}, expected {(d, d)}")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"block {i} contains non-finite entries")
            if check:
                skew = np.linalg.norm(a - a.conj().T)
                if skew > herm_tol * max(np.linalg.norm(a), 1e-300):
                    raise NonHermitian(f"block {i} is not Hermitian (|A - A^+| = {skew:.3e})")
            stored.append(_freeze(0.5 * (a + a.conj().T)))
        self.shape = shape
        self.blocks = tuple(stored)

    # construction helpers -------------------------------------------------

    @classmethod
    def zeros(cls, shape, **kw):
        shape = AlgebraShape.of(shape)
        return cls(shape, [np.zeros((d, d)) for d in shape.blocks], **kw)

    @classmethod
    def identity(cls, shape, **kw):
        shape = AlgebraShape.of(shape)
        return cls(shape, [np.eye(d) for d in shape.blocks], **kw)

    @classmethod
    def from_dense(cls, shape, matrix, **kw):
        """Cut the diagonal blocks out of a dense matrix on the full space."""
        shape = AlgebraShape.of(shape)
        m = np.asarray(matrix, dtype=np.complex128)
        n = shape.hilbert_dim
        if m.shape != (n, n):
            raise ShapeMismatch(f"dense matrix has shape {m.shape}, expected {(n, n)}")
        blocks = [m[o:o + d, o:o + d] for o, d in zip(shape.offsets, shape.blocks)]
        return cls(shape, blocks, **kw)

    def to_dense(self) -> np.ndarray:
        n = self.shape.hilbert_dim
        out = np.zeros((n, n), dtype=np.complex128)
        for o, d, b in zip(self.shape.offsets, self.shape.blocks, self.blocks):
            out[o:o + d, o:o + d] = b
        return out

    def diagonal(self) -> np.ndarray:
        return np.concatenate([np.real(np.diag(b)) for b in self.blocks])

    # spectral data ---------------------------------------------------------

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        vals, vecs = [], []
        for b in self.blocks:
            lam, v = np.linalg.eigh(b)
            vals.append(_freeze(lam))
            vecs.append(_freeze(v))
        return SpectralDecomposition(tuple(vals), tuple(vecs))

    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.all_eigenvalues()

    def trace(self) -> float:
        return float(sum(np.real(np.trace(b)) for b in self.blocks))

    def norm(self) -> float:
        """Hilbert-Schmidt (Frobenius) norm."""
        return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) for b in self.blocks)))

    # arithmetic ------------------------------------------------------------

    def _combine(self, blocks, other=None):
        return HermitianElement(self.shape, blocks, check=False)

    def _check_same_shape(self, other):
        if not isinstance(other, HermitianElement):
            return NotImplemented
        if other.shape != self.shape:
            raise ShapeMismatch(f"shapes {list(self.shape)} and {list(other.shape)} differ")
        return None

    def __add__(self, other):
        if self._check_same_shape(other) is NotImplemented:
            return NotImplemented
        return self._combine([a + b for a, b in zip(self.blocks, other.blocks)], other)

    def __sub__(self, other):
        if self._check_same_shape(other) is NotImplemented:
            return NotImplemented
        return self._combine([a - b for a, b in zip(self.blocks, other.blocks)], other)

    def __neg__(self):
        return self._combine([-a for a in self.blocks])

    def __mul__(self, scalar):
        if not isinstance(scalar, Real):
            return NotImplemented
        return self._combine([float(scalar) * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not isinstance(scalar, Real):
            return NotImplemented
        return self._combine([a / float(scalar) for a in self.blocks])

    def allclose(self, other, atol=1e-9) -> bool:
        if other.shape != self.shape:
            return False
        return all(np.allclose(a, b, rtol=0.0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"{type(self).__name__}(shape={list(self.shape)}, blocks={[b.tolist() for b in self.blocks]})"


class State(HermitianElement):
    """Positive functional given by a block-diagonal PSD density.

    Eigenvalues in ``[-psd_tol, 0)`` are clipped to zero; anything more
    negative raises :class:`NotPositive`. The trace need not be one.
    """

    def __init__(self, shape, blocks: Sequence, *, check: bool = True):
        super().__init__(shape, blocks, check=check)
        psd_tol = tolerances().psd
        spec = self.spectrum
        clipped = False
        for i, lam in enumerate(spec.eigenvalues):
            if lam.size and lam[0] < -psd_tol:
                raise NotPositive(f"block {i} has eigenvalue {lam[0]:.3e} < -{psd_tol:g}")
            if lam.size and lam[0] < 0.0:
                clipped = True
        if clipped:
            vals = tuple(_freeze(np.clip(lam, 0.0, None)) for lam in spec.eigenvalues)
            spec = SpectralDecomposition(vals, spec.eigenvectors)
            self.blocks = tuple(_freeze(b) for b in spec.reconstruct())
            self.__dict__["spectrum"] = spec
        self.trace_value = float(sum(np.sum(lam) for lam in spec.eigenvalues))

    @classmethod
    def from_weights(cls, weights) -> "State":
        """Classical state on ``[1, 1, ..., 1]`` from a nonnegative vector."""
        w = np.asarray(weights, dtype=float).ravel()
        if w.size == 0:
            raise ValueError("weight vector is empty")
        if np.any(w < 0):
            raise NotPositive("classical weights must be nonnegative")
        return cls(AlgebraShape.classical(w.size), [[[v]] for v in w])

    @classmethod
    def from_element(cls, x: HermitianElement) -> "State":
        return cls(x.shape, x.blocks, check=False)

    def weights(self) -> np.ndarray:
        """Diagonal weights; meaningful as a measure for commutative shapes."""
        return self.diagonal()

    def trace(self) -> float:
        return self.trace_value

    def mix(self, other: "State", lam: float) -> "State":
        """Convex combination ``lam * self + (1 - lam) * other``."""
        self._check_same_shape(other)
        return State(self.shape, [lam * a + (1.0 - lam) * b for a, b in zip(self.blocks, other.blocks)],
                     check=False)


def spectral(a: HermitianElement) -> SpectralDecomposition:
    """Per-block eigendecomposition of a Hermitian element.

    Raw arrays are accepted as a single full block and validated.
    """
    if not isinstance(a, HermitianElement):
        m = np.asarray(a, dtype=np.complex128)
        a = HermitianElement(AlgebraShape.of(m.shape[0]), [m])
    return a.spectrum


def apply_spectral(a: HermitianElement, fn: Callable[[np.ndarray], np.ndarray]) -> list[np.ndarray]:
    """Blocks of ``fn(a)`` via the spectral theorem."""
    return a.spectrum.reconstruct(fn)


def _on_support(fn, psd_tol):
    def mapped(lam):
        out = np.zeros_like(lam)
        mask = lam > psd_tol
        out[mask] = fn(lam[mask])
        return out
    return mapped


def matrix_power(rho: State, p: float) -> State:
    """``rho**p`` computed on the support, with ``0**p = 0``."""
    if not p > 0:
        raise ValueError(f"power must be positive, got {p}")
    fn = _on_support(lambda lam: lam ** p, tolerances().psd)
    return State(rho.shape, apply_spectral(rho, fn), check=False)


def matrix_log_support(rho: State) -> HermitianElement:
    """Logarithm on the support of ``rho``; kernel directions map to 0."""
    fn = _on_support(np.log, tolerances().psd)
    return HermitianElement(rho.shape, apply_spectral(rho, fn), check=False)


def support_projection(rho: HermitianElement) -> HermitianElement:
    psd_tol = tolerances().psd
    return HermitianElement(rho.shape, apply_spectral(rho, lambda lam: (lam > psd_tol).astype(float)),
                            check=False)


def trace_pairing(x: HermitianElement, rho: HermitianElement) -> float:
    """Real trace pairing ``sum_b Re tr(x_b rho_b)``."""
    if x.shape != rho.shape:
        raise ShapeMismatch(f"shapes {list(x.shape)} and {list(rho.shape)} differ")
    # tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B
    return float(sum(np.real(np.vdot(b, a)) for a, b in zip(x.blocks, rho.blocks)))


def trace_norm(x: HermitianElement) -> float:
    return float(np.sum(np.abs(x.eigenvalues())))


def trace_distance(a: HermitianElement, b: HermitianElement) -> float:
    """``||a - b||_1`` (no factor one half)."""
    return trace_norm(a - b)


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_state(shape, seed=0, normalized: bool = True, rank=None) -> State:
    """Ginibre random state ``G G^dagger`` per block.

    Full rank with probability one unless ``rank`` caps the number of
    Ginibre columns per block (an int, or one entry per block).
    """
    shape = AlgebraShape.of(shape)
    rng = as_rng(seed)
    if rank is None:
        ranks = shape.blocks
    elif isinstance(rank, Integral):
        ranks = tuple(min(int(rank), d) for d in shape.blocks)
    else:
        ranks = tuple(rank)
    blocks = []
    for d, r in zip(shape.blocks, ranks):
        g = _ginibre(rng, d, r)
        blocks.append(g @ g.conj().T)
    total = sum(np.real(np.trace(b)) for b in blocks)
    if normalized and total > 0:
        blocks = [b / total for b in blocks]
    return State(shape, blocks)


def random_hermitian(shape, seed=0, scale: float = 1.0) -> HermitianElement:
    shape = AlgebraShape.of(shape)
    rng = as_rng(seed)
    blocks = []
    for d in shape.blocks:
        g = _ginibre(rng, d, d)
        blocks.append(scale * 0.5 * (g + g.conj().T))
    return HermitianElement(shape, blocks)
