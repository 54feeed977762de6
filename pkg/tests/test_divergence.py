import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgamma import (
    GammaOutOfRange,
    LengthMismatch,
    ShapeMismatch,
    State,
    classical_gamma_divergence,
    cosine_residual,
    divergence,
    gamma_divergence,
    hasegawa_divergence,
    random_state,
    relative_entropy_0,
    relative_entropy_1,
)
from qgamma.divergence import divergence_sweep, parse_gamma_range

HALF_ORACLE = 4.0 * (1.0 - math.sqrt(0.5 * 0.75) - math.sqrt(0.5 * 0.25))
KL_ORACLE = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
REVERSE_KL_ORACLE = 0.5 * math.log(0.5 / 0.75) + 0.5 * math.log(0.5 / 0.25)


def test_gamma_divergence_examples(p_half, q_skew, projector_pair):
    w = random_state([2, 1], 3)
    assert gamma_divergence(w, w, 0.37) == 0.0
    assert gamma_divergence(p_half, q_skew, 0.5) == pytest.approx(HALF_ORACLE, abs=1e-13)
    assert HALF_ORACLE == pytest.approx(0.1362968, abs=2e-7)
    assert gamma_divergence(*projector_pair, 0.5) == pytest.approx(2.0, abs=1e-13)
    two, one = State.from_weights([2.0]), State.from_weights([1.0])
    assert gamma_divergence(two, one, 0.5) == pytest.approx((1 + 0.5 - math.sqrt(2)) / 0.25, abs=1e-13)
    assert (1 + 0.5 - math.sqrt(2)) / 0.25 == pytest.approx(0.3431458, abs=1e-7)


def test_gamma_divergence_errors(p_half):
    with pytest.raises(ShapeMismatch):
        gamma_divergence(p_half, random_state([2], 0), 0.5)
    for g in (0.0, 1.0):
        with pytest.raises(GammaOutOfRange):
            gamma_divergence(p_half, p_half, g)


def test_relative_entropy_0_examples(p_half, q_skew):
    assert relative_entropy_0(q_skew, q_skew) == 0.0
    assert relative_entropy_0(p_half, q_skew) == pytest.approx(KL_ORACLE, abs=1e-14)
    assert KL_ORACLE == pytest.approx(0.1308123, abs=3e-7)
    assert relative_entropy_0(State.from_weights([1.0, 0.0]), p_half) == math.inf


def test_relative_entropy_0_support_in_quantum_basis(projector_pair):
    w, f = projector_pair
    assert relative_entropy_0(w, f) == math.inf
    assert relative_entropy_0(f, f) == 0.0


def test_relative_entropy_1_examples(p_half, q_skew):
    r = random_state([3], 2, rank=2)
    assert relative_entropy_1(r, r) == 0.0
    assert relative_entropy_1(p_half, q_skew) == pytest.approx(REVERSE_KL_ORACLE, abs=1e-14)
    assert REVERSE_KL_ORACLE == pytest.approx(0.1438410, abs=1e-7)
    assert relative_entropy_1(q_skew, p_half) == pytest.approx(KL_ORACLE, abs=1e-14)


def test_non_normalized_boundary():
    two, one = State.from_weights([2.0]), State.from_weights([1.0])
    assert relative_entropy_0(two, one) == pytest.approx(1 - math.log(2), abs=1e-14)
    assert gamma_divergence(two, one, 1e-6) == pytest.approx(1 - math.log(2), abs=1e-5)


def test_divergence_dispatch(p_half, q_skew):
    assert divergence(p_half, q_skew, 0.0) == relative_entropy_0(p_half, q_skew)
    assert divergence(p_half, q_skew, 1.0) == relative_entropy_1(p_half, q_skew)
    assert divergence(p_half, q_skew, 0.5) == gamma_divergence(p_half, q_skew, 0.5)
    with pytest.raises(GammaOutOfRange):
        divergence(p_half, q_skew, 1.2)


def test_classical_examples():
    assert classical_gamma_divergence([0.2, 0.8], [0.2, 0.8], 0.3) == 0.0
    assert classical_gamma_divergence([0.5, 0.5], [0.75, 0.25], 0.5) == pytest.approx(HALF_ORACLE, abs=1e-14)
    assert classical_gamma_divergence([2.0], [1.0], 0.5) == pytest.approx(0.3431458, abs=1e-7)
    with pytest.raises(LengthMismatch):
        classical_gamma_divergence([0.5, 0.5], [1.0], 0.5)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 6), g=st.floats(0.02, 0.98))
def test_commutative_reduction(seed, n, g):
    rng = np.random.default_rng(seed)
    p, q = rng.uniform(0, 2, n), rng.uniform(0, 2, n)
    quantum = gamma_divergence(State.from_weights(p), State.from_weights(q), g)
    assert quantum == pytest.approx(classical_gamma_divergence(p, q, g), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), g=st.floats(0.02, 0.98), blocks=st.sampled_from([[2], [3], [2, 1], [1, 1, 1], [4]]))
def test_divergence_properties(seed, g, blocks):
    rng = np.random.default_rng(seed)
    w, f = random_state(blocks, rng, normalized=False), random_state(blocks, rng, normalized=False)
    d = gamma_divergence(w, f, g)
    assert d >= 0.0
    assert d == pytest.approx(gamma_divergence(f, w, 1 - g), abs=1e-10)
    assert gamma_divergence(w, w, g) == 0.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), g=st.floats(0.02, 0.98), lam=st.floats(0, 1))
def test_joint_convexity(seed, g, lam):
    rng = np.random.default_rng(seed)
    w1, w2, f1, f2 = (random_state([3], rng) for _ in range(4))
    lhs = gamma_divergence(w1.mix(w2, lam), f1.mix(f2, lam), g)
    rhs = lam * gamma_divergence(w1, f1, g) + (1 - lam) * gamma_divergence(w2, f2, g)
    assert lhs <= rhs + 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), g=st.floats(0.02, 0.98))
def test_hasegawa_path_matches_on_normalized_states(seed, g):
    rng = np.random.default_rng(seed)
    w, f = random_state([2, 2], rng), random_state([2, 2], rng)
    assert hasegawa_divergence(w, f, g) == pytest.approx(gamma_divergence(w, f, g), abs=1e-10)


def test_hasegawa_requires_normalized():
    with pytest.raises(ValueError):
        hasegawa_divergence(State.from_weights([2.0]), State.from_weights([1.0]), 0.5)


def test_cosine_residual_examples():
    rng = np.random.default_rng(11)
    w, f, p = (random_state([2, 1], rng) for _ in range(3))
    assert abs(cosine_residual(w, f, p, 0.3)) <= 1e-9
    assert abs(cosine_residual(w, f, f, 0.3)) <= 1e-12
    assert abs(cosine_residual(w, w, p, 0.3)) <= 1e-12
    with pytest.raises(ShapeMismatch):
        cosine_residual(w, f, random_state([3], 0), 0.3)


def test_small_gamma_approaches_relative_entropy_0():
    rng = np.random.default_rng(4)
    w, f = random_state([3], rng), random_state([3], rng)
    d0 = relative_entropy_0(w, f)
    errs = [abs(gamma_divergence(w, f, g) - d0) for g in (1e-2, 1e-3, 1e-4)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_gamma_range_parsing():
    grid = parse_gamma_range("0.01:0.99:0.01")
    assert len(grid) == 99
    assert grid[0] == 0.01 and grid[-1] == 0.99
    np.testing.assert_array_equal(parse_gamma_range("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1])
    np.testing.assert_array_equal(parse_gamma_range("0.3"), [0.3])
    np.testing.assert_array_equal(parse_gamma_range("0.3:0.3:0.1"), [0.3])
    for bad in ("0.5:0.2:0.1", "0:1:0", "x", "-0.1:0.5:0.1", "0:1.5:0.1", "0:1:-1", ""):
        with pytest.raises(ValueError):
            parse_gamma_range(bad)


def test_sweep_endpoints_and_duality(p_half, q_skew):
    rows = divergence_sweep(p_half, q_skew, parse_gamma_range("0:1:0.05"))
    assert rows[0][1] == pytest.approx(KL_ORACLE)
    assert rows[-1][1] == pytest.approx(REVERSE_KL_ORACLE)
    back = dict(divergence_sweep(q_skew, p_half, parse_gamma_range("0:1:0.05")))
    for g, d in rows:
        assert d == pytest.approx(back[round(1 - g, 12)], abs=1e-12)
    values = np.array([d for _, d in rows])
    assert np.max(np.abs(np.diff(values))) < 0.01  # continuous through the endpoints
    assert all(d == 0.0 for _, d in divergence_sweep(p_half, p_half, parse_gamma_range("0:1:0.1")))
