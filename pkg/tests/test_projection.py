import warnings

import numpy as np
import pytest

from qgamma import (
    ConstraintSet,
    HermitianElement,
    Infeasible,
    MaxIterationsWarning,
    SamplingFailed,
    ShapeMismatch,
    State,
    bregman_project,
    ell_gamma,
    gamma_divergence,
    optimality_residuals,
    pythagorean_residual,
    random_hermitian,
    random_state,
    trace_pairing,
)
from qgamma.projection import two_start_distance

DIFF = HermitianElement([1, 1], [[[1.0]], [[-1.0]]])


def _feasible_set(shape, g, seed, count=2):
    """Random affine constraints passing through ell_gamma of a full-rank state."""
    rng = np.random.default_rng(seed)
    inner = random_state(shape, rng)
    x0 = ell_gamma(inner, g)
    rows = [random_hermitian(shape, rng) for _ in range(count - 1)] + [HermitianElement.identity(shape)]
    return inner, ConstraintSet(g, tuple((a, trace_pairing(a, x0)) for a in rows))


def test_point_already_feasible():
    psi = State.from_weights([0.3, 0.3])
    res = bregman_project(psi, ConstraintSet(0.5, ((DIFF, 0.0),)))
    assert res.converged
    assert res.projected.allclose(psi, atol=1e-12)
    assert res.divergence == pytest.approx(0.0, abs=1e-12)


def test_classical_quadratic_instance():
    psi = State.from_weights([0.8, 0.2])
    res = bregman_project(psi, ConstraintSet(0.5, ((DIFF, 0.0),)))
    # minimize (sqrt a - sqrt .8)^2 + (sqrt a - sqrt .2)^2 times 2: sqrt a = (sqrt .8 + sqrt .2) / 2
    a = ((np.sqrt(0.8) + np.sqrt(0.2)) / 2) ** 2
    assert a == pytest.approx(0.45)
    np.testing.assert_allclose(res.projected.weights(), [a, a], atol=1e-6)
    assert res.divergence == pytest.approx(0.2, abs=1e-6)
    assert res.kkt_residual <= 1e-8


def test_scalar_block_fixed_point():
    C = ConstraintSet(0.5, ((HermitianElement([1], [[[1.0]]]), 2.0),))  # x = ell_{1/2}(1) = 2
    res = bregman_project(State.from_weights([4.0]), C)
    assert res.projected.weights()[0] == pytest.approx(1.0, abs=1e-9)
    assert res.divergence == pytest.approx(2.0, abs=1e-9)


def test_pythagorean_examples():
    r, xbar, y = State.from_weights([0.2, 0.2]), State.from_weights([0.45, 0.45]), State.from_weights([0.8, 0.2])
    assert abs(pythagorean_residual(r, xbar, y, 0.5)) <= 1e-9
    assert abs(pythagorean_residual(xbar, xbar, y, 0.5)) <= 1e-15
    assert abs(pythagorean_residual(r, y, y, 0.5)) <= 1e-15


def test_optimality_examples():
    psi = State.from_weights([0.8, 0.2])
    C = ConstraintSet(0.5, ((DIFF, 0.0),))
    res = bregman_project(psi, C)
    # omega = projection: both extra terms vanish
    assert gamma_divergence(res.projected, psi, 0.5) - res.divergence == 0.0
    w = State.from_weights([0.2, 0.2])
    residual = gamma_divergence(w, psi, 0.5) - res.divergence - gamma_divergence(res.projected, w, 0.5)
    assert residual == pytest.approx(0.0, abs=1e-9)
    assert min(optimality_residuals(res, psi, C, samples=16)) >= -1e-6


@pytest.mark.parametrize("shape", [[2], [3], [2, 1], [4]])
@pytest.mark.parametrize("g", [0.25, 0.5, 0.8])
def test_random_quantum_projection(shape, g):
    _, C = _feasible_set(shape, g, seed=sum(shape) * 10 + int(g * 100))
    psi = random_state(shape, 99)
    res = bregman_project(psi, C)
    assert res.converged
    assert res.feasibility_residual <= 1e-8
    assert np.max(np.abs(C.residuals(res.coordinate))) <= 1e-8
    assert min(optimality_residuals(res, psi, C, samples=24, seed=1)) >= -1e-6
    hist = np.array(res.objective_history)
    assert np.all(np.diff(hist) <= 1e-12 * max(1.0, abs(hist[0])))
    assert two_start_distance(psi, C, seed=3) <= 1e-6


def test_interior_projection_satisfies_pythagoras():
    inner, C = _feasible_set([3], 0.4, seed=5)
    psi = random_state([3], 6)
    res = bregman_project(psi, C)
    assert abs(pythagorean_residual(inner, res.projected, psi, 0.4)) <= 1e-6


def test_inconsistent_constraints_are_infeasible():
    a = HermitianElement([1, 1], [[[1.0]], [[0.0]]])
    C = ConstraintSet(0.5, ((a, 1.0), (2 * a, 3.0)))
    with pytest.raises(Infeasible):
        bregman_project(State.from_weights([0.5, 0.5]), C)


def test_psd_infeasible_constraints():
    C = ConstraintSet(0.5, ((HermitianElement.identity([2]), -1.0),))  # trace of a PSD point is never negative
    with pytest.raises(Infeasible):
        bregman_project(random_state([2], 0), C)


def test_iteration_cap_reports_partial_result():
    _, C = _feasible_set([3], 0.3, seed=1)
    with pytest.warns(MaxIterationsWarning):
        res = bregman_project(random_state([3], 2), C, max_iter=2)
    assert not res.converged
    assert res.iterations == 2
    assert res.feasibility_residual <= 1e-8


def test_random_start_is_deterministic():
    _, C = _feasible_set([2], 0.6, seed=4)
    psi = random_state([2], 8)
    a = bregman_project(psi, C, start="random", seed=11)
    b = bregman_project(psi, C, start="random", seed=11)
    assert a.projected.allclose(b.projected, atol=0.0)


def test_sampling_fails_on_a_single_point():
    C = ConstraintSet(0.5, ((HermitianElement([1], [[[1.0]]]), 2.0),))
    psi = State.from_weights([4.0])
    res = bregman_project(psi, C)
    with pytest.raises(SamplingFailed):
        optimality_residuals(res, psi, C)


def test_constraint_set_validation():
    with pytest.raises(ValueError):
        ConstraintSet(0.5, ())
    with pytest.raises(ShapeMismatch):
        ConstraintSet(0.5, ((HermitianElement.identity([2]), 1.0), (HermitianElement.identity([1, 1]), 1.0)))
    with pytest.raises(ValueError):
        ConstraintSet(1.0, ((HermitianElement.identity([2]), 1.0),))
