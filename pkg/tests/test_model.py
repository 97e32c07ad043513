import math

import numpy as np
import pytest

from sketchuq import DesignData, ModelSpec, exact_solve, model_variance, simulate_response
from sketchuq.errors import DimensionMismatch, InvalidInput, RankDeficientDesign
from sketchuq.model import simulate_responses


def test_model_spec_validation():
    with pytest.raises(InvalidInput):
        ModelSpec([1.0], 0.0)
    with pytest.raises(InvalidInput):
        ModelSpec([1.0], math.nan)


def test_design_validation():
    with pytest.raises(RankDeficientDesign):
        DesignData(np.ones((3, 2)), np.ones(3))
    with pytest.raises(DimensionMismatch):
        DesignData(np.eye(2), np.ones(3))
    with pytest.raises(RankDeficientDesign):
        DesignData(np.ones((1, 2)), np.ones(1))


def test_exact_solve_fixture(fixture_data):
    fit = exact_solve(fixture_data)
    assert np.allclose(fit.beta_hat, [1, 2])
    assert np.allclose(fit.y_hat, [1, 2, 0])
    assert np.allclose(fit.residual, [0, 0, 3])
    assert fit.cos_theta == pytest.approx(math.sqrt(5 / 14))
    assert fit.kappa_x == pytest.approx(1.0)
    assert np.allclose(fit.hat_matrix, np.diag([1.0, 1.0, 0.0]))


def test_exact_solve_in_range():
    X = np.array([[1.0, 0], [0, 1], [0, 0]])
    fit = exact_solve(DesignData(X, np.array([1.0, 2.0, 0.0])))
    assert np.allclose(fit.residual, 0)
    assert fit.cos_theta == pytest.approx(1.0)


def test_exact_solve_zero_response():
    fit = exact_solve(DesignData(np.eye(2), np.zeros(2)))
    assert math.isnan(fit.cos_theta)


def test_model_variance_examples():
    assert np.allclose(model_variance(DesignData(np.eye(2), np.zeros(2)), ModelSpec([1, 2], 1.0)), np.eye(2))
    X = np.array([[1.0, 0], [0, 1], [0, 0]])
    assert np.allclose(model_variance(DesignData(X, np.zeros(3)), ModelSpec([1, 2], 4.0)), 4 * np.eye(2))


def test_model_variance_matches_simulation():
    X = np.array([[1.0, 1], [1, 2], [1, 3]])
    spec = ModelSpec([0.5, -1.0], 1.0)
    Y = simulate_responses(X, spec, 11, 100_000)
    B = np.linalg.lstsq(X, Y, rcond=None)[0]
    emp = np.cov(B)
    V = model_variance(DesignData(X, Y[:, 0]), spec)
    assert np.linalg.norm(emp - V, 2) / np.linalg.norm(V, 2) < 0.03


def test_simulated_noise_moments():
    spec = ModelSpec([1.0, 2.0], 1.0)
    E = simulate_responses(np.eye(2), spec, 5, 100_000) - np.array([[1.0], [2.0]])
    assert np.all(np.abs(E.mean(axis=1)) < 4 / math.sqrt(1e5))
    assert np.all(np.abs(E.var(axis=1, ddof=1) - 1.0) < 0.05)


def test_vanishing_noise():
    y = simulate_response(np.eye(3), ModelSpec([1.0, 2.0, 3.0], 1e-30), 0)
    assert np.max(np.abs(y - [1, 2, 3])) < 1e-10


def test_simulation_reproducible():
    spec = ModelSpec([1.0, 2.0], 0.5)
    a = simulate_response(np.eye(2), spec, 42)
    b = simulate_response(np.eye(2), spec, 42)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, simulate_response(np.eye(2), spec, 43))


def test_spec_dimension_checked():
    with pytest.raises(DimensionMismatch):
        simulate_response(np.eye(3), ModelSpec([1.0, 2.0], 1.0), 0)
