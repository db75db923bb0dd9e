import math

import numpy as np
import pytest

from imaginarity import NumericalError, ValidationError
from imaginarity.divergences import Family, kernel_objective, sandwiched_kernel, tsallis_kernel
from imaginarity.optimizer import (OptConfig, grid_oracle_qubit, maximize_over_pure_real_states,
                                   maximize_over_real_states, real_qubit_state, sigma_from_params)
from imaginarity.states import canonical_density, random_density, is_real_state, validate_density

FAST = OptConfig(restarts=4)


def _check_state(sigma):
    validate_density(sigma)
    assert is_real_state(sigma, 1e-9)


def test_config_validation():
    with pytest.raises(ValidationError):
        OptConfig(restarts=0)
    with pytest.raises(ValidationError):
        OptConfig(tol=0)


def test_sigma_from_params():
    s = sigma_from_params([1.0, 0.0, 1.0], 2)
    np.testing.assert_allclose(s, np.eye(2) / 2)
    assert sigma_from_params([0.0, 0.0, 0.0], 2) is None
    s = sigma_from_params([3.0, 4.0], 2, mode=1)
    np.testing.assert_allclose(s, np.outer([0.6, 0.8], [0.6, 0.8]))


def test_constant_objective():
    sigma, v = maximize_over_real_states(lambda s: 1.0, 2, FAST)
    assert v == 1.0
    _check_state(sigma)
    sigma, v = grid_oracle_qubit(lambda s: 1.0, 64)
    assert v == 1.0


def test_tsallis_maximally_mixed(backend):
    obj = kernel_objective(Family.T, canonical_density(0), 0.75)
    sigma, v = maximize_over_real_states(obj, 2)
    assert v == pytest.approx(2 ** -0.25, abs=1e-6)
    np.testing.assert_allclose(sigma, np.eye(2) / 2, atol=1e-3)
    _check_state(sigma)
    _, g = grid_oracle_qubit(obj, 256)
    assert g == pytest.approx(2 ** -0.25, abs=1e-4)
    assert abs(g - v) <= 1e-5


@pytest.mark.parametrize("A", [0.0, 0.3, 0.7, 1.0])
def test_sandwiched_maximum(backend, A):
    obj = kernel_objective(Family.S, canonical_density(A), 0.75)
    sigma, v = maximize_over_real_states(obj, 2)
    assert v == pytest.approx(((1 + A) / 2) ** 0.75, abs=1e-6)
    _check_state(sigma)


@pytest.mark.parametrize("A", [0.0, 0.5, 1.0])
def test_pure_restricted(backend, A):
    obj = kernel_objective(Family.T, canonical_density(A), 0.75)
    sigma, v = maximize_over_pure_real_states(obj, 2)
    assert v == pytest.approx((1 + A) / 2, abs=1e-7)
    assert np.linalg.matrix_rank(sigma, tol=1e-8) == 1
    _check_state(sigma)
    _, full = maximize_over_real_states(obj, 2)
    assert full >= v - 1e-9


def test_grid_oracle_example():
    rho = canonical_density(0.5)
    _, v = grid_oracle_qubit(lambda s: sandwiched_kernel(rho, s, 0.75), 256)
    assert v == pytest.approx(0.805927448867656, abs=1e-4)
    with pytest.raises(ValidationError):
        grid_oracle_qubit(lambda s: 1.0, 32)


def test_generic_callable_matches_fast_path():
    rho = canonical_density(0.4)
    _, fast = maximize_over_real_states(kernel_objective(Family.T, rho, 0.6), 2, FAST)
    _, slow = maximize_over_real_states(lambda s: tsallis_kernel(rho, s, 0.6), 2, FAST)
    assert fast == pytest.approx(slow, abs=1e-9)


def test_deterministic_given_seed(backend):
    obj = kernel_objective(Family.O, random_density(3, seed=1), 0.75)
    a = maximize_over_real_states(obj, 3, OptConfig(seed=5, restarts=3))
    b = maximize_over_real_states(obj, 3, OptConfig(seed=5, restarts=3))
    assert a[1] == b[1]
    np.testing.assert_array_equal(a[0], b[0])


def test_non_finite_objective_reports_sigma():
    with pytest.raises(NumericalError, match="sigma"):
        maximize_over_real_states(lambda s: math.nan, 2, FAST)


def test_real_qubit_state_covers_extremes():
    np.testing.assert_allclose(real_qubit_state(0.0, 1.0), np.diag([1.0, 0.0]), atol=1e-15)
    s = real_qubit_state(math.pi / 4, 1.0)
    np.testing.assert_allclose(s, np.full((2, 2), 0.5), atol=1e-15)
