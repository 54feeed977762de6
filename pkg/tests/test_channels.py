import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgamma import (
    Channel,
    ChannelSampler,
    HermitianElement,
    ShapeMismatch,
    State,
    apply_coarse_graining,
    apply_markov,
    duality_residual,
    gamma_divergence,
    identity_channel,
    monotonicity_audit,
    pinching_channel,
    random_channel,
    random_hermitian,
    random_state,
    unitary_channel,
)
from qgamma.channels import choi_matrix

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def test_apply_markov_examples():
    x = random_hermitian([2, 1], 1)
    assert apply_markov(identity_channel([2, 1]), x).allclose(x, atol=1e-15)
    flip = HermitianElement([2], [[[0, 1], [1, 0]]])
    assert apply_markov(pinching_channel([2]), flip).norm() == 0.0
    out = apply_markov(unitary_channel([2], HADAMARD), HermitianElement([2], [np.diag([1.0, 0.0])]))
    np.testing.assert_allclose(out.blocks[0], np.full((2, 2), 0.5), atol=1e-15)


def test_apply_coarse_graining_examples(projector_pair):
    rho = random_state([3], 2)
    assert apply_coarse_graining(identity_channel([3]), rho).allclose(rho, atol=1e-15)
    w, f = projector_pair
    np.testing.assert_allclose(apply_coarse_graining(pinching_channel([2]), f).blocks[0], np.diag([0.5, 0.5]), atol=1e-15)
    np.testing.assert_allclose(apply_coarse_graining(unitary_channel([2], HADAMARD), w).blocks[0],
                               np.full((2, 2), 0.5), atol=1e-15)
    with pytest.raises(ShapeMismatch):
        apply_coarse_graining(identity_channel([2]), rho)


def test_output_cut_to_blocks():
    # a unitary mixing the two blocks: the output is pinched onto the block algebra
    T = unitary_channel([1, 1], HADAMARD)
    out = apply_coarse_graining(T, State.from_weights([1.0, 0.0]))
    np.testing.assert_allclose(out.weights(), [0.5, 0.5], atol=1e-15)


def test_duality_examples():
    T = random_channel([3], [2], 2, 4)
    rho = random_state([3], 5)
    assert duality_residual(T, random_hermitian([2], 6), rho) <= 1e-10
    assert apply_markov(T, HermitianElement.identity([2])).allclose(HermitianElement.identity([3]), atol=1e-12)
    assert duality_residual(T, HermitianElement.zeros([2]), rho) == 0.0


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), din=st.sampled_from([[1], [2], [3], [2, 1], [1, 1, 1], [4]]),
       dout=st.sampled_from([[1], [2], [3], [2, 1], [1, 1]]), k=st.integers(1, 4))
def test_random_channels_are_cptp(seed, din, dout, k):
    k = max(k, -(-sum(din) // sum(dout)))
    T = random_channel(din, dout, k, seed)
    assert T.trace_preserving and T.unital
    assert np.linalg.eigvalsh(choi_matrix(T)).min() >= -1e-12
    rho = random_state(din, seed)
    assert apply_coarse_graining(T, rho).trace() == pytest.approx(rho.trace(), abs=1e-12)
    assert duality_residual(T, random_hermitian(dout, seed + 1), rho) <= 1e-10


def test_random_channel_examples():
    T = random_channel([3], [3], 1, 0)
    u = T.kraus[0]
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-12)
    a, b = random_channel([2], [3], 2, 9), random_channel([2], [3], 2, 9)
    assert all(np.array_equal(x, y) for x, y in zip(a.kraus, b.kraus))
    kk = sum(k.conj().T @ k for k in random_channel([4], [2], 3, 1).kraus)
    np.testing.assert_allclose(kk, np.eye(4), atol=1e-10)
    with pytest.raises(ValueError):
        random_channel([4], [1], 2, 0)


def test_unital_matches_trace_preserving_both_ways():
    amp = Channel([2], [2], (np.diag([1.0, math.sqrt(0.7)]), math.sqrt(0.3) * np.array([[0.0, 1.0], [0.0, 0.0]])))
    assert amp.unital and amp.trace_preserving
    half = Channel([2], [2], (0.5 * np.eye(2),))
    assert not half.unital and not half.trace_preserving
    for seed in range(20):
        T = random_channel([3], [2], 2, seed)
        scaled = Channel(T.in_shape, T.out_shape, tuple(1.1 * k for k in T.kraus))
        assert (T.unital, T.trace_preserving) == (True, True)
        assert (scaled.unital, scaled.trace_preserving) == (False, False)


def test_pinching_properties():
    P = pinching_channel([3])
    assert P.unital and P.trace_preserving
    diag = State.from_weights([0.2, 0.3, 0.5]).to_dense()
    d = State([3], [diag])
    assert apply_coarse_graining(P, d).allclose(d, atol=0.0)
    rho = random_state([3], 3)
    once = apply_coarse_graining(P, rho)
    assert apply_coarse_graining(P, once).allclose(once, atol=0.0)
    assert apply_coarse_graining(P.compose(P), rho).allclose(once, atol=1e-15)


def test_kraus_shape_checked():
    with pytest.raises(ShapeMismatch):
        Channel([2], [3], (np.eye(2),))


def test_monotonicity_examples(projector_pair):
    w, f = projector_pair
    rep = monotonicity_audit(w, f, 0.5, identity_channel([2]), trials=3)
    assert rep.min_gap == 0.0 and rep.passed
    before = gamma_divergence(w, f, 0.5)
    after = gamma_divergence(apply_coarse_graining(pinching_channel([2]), w),
                             apply_coarse_graining(pinching_channel([2]), f), 0.5)
    assert before == pytest.approx(2.0)
    assert after == pytest.approx(4 * (1 - math.sqrt(0.5)), abs=1e-13)
    assert after == pytest.approx(1.1715729, abs=1e-7)
    rng = np.random.default_rng(0)
    w2, f2 = random_state([2], rng), random_state([2], rng)
    rep = monotonicity_audit(w2, f2, 0.5, ChannelSampler(w2.shape), trials=1000, seed=1)
    assert rep.passed and len(rep.gaps) == 1000


def test_monotonicity_audit_is_deterministic():
    w, f = random_state([3], 1), random_state([3], 2)
    a = monotonicity_audit(w, f, 0.3, ChannelSampler(w.shape), trials=20, seed=5)
    b = monotonicity_audit(w, f, 0.3, ChannelSampler(w.shape), trials=20, seed=5)
    assert a.gaps == b.gaps
    with pytest.raises(ValueError):
        monotonicity_audit(w, f, 0.3, ChannelSampler(w.shape), trials=0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), g=st.floats(0.01, 0.99))
def test_monotonicity_across_shapes(seed, g):
    rng = np.random.default_rng(seed)
    w, f = random_state([2, 1], rng), random_state([2, 1], rng)
    T = ChannelSampler(w.shape, out_shape=[1, 1]).sample(rng)
    gap = gamma_divergence(w, f, g) - gamma_divergence(apply_coarse_graining(T, w), apply_coarse_graining(T, f), g)
    assert gap >= -1e-9
