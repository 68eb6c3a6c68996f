import numpy as np
import pytest

from gyromag.bench_ellipsoid import EllipsoidFitResult, ellipsoid_fit
from gyromag.calmodel import correct_measurement
from gyromag.exceptions import (ConfigurationError, InsufficientExcitationError,
                                NonEllipsoidError)


def _sphere(n=1000):
    """Fibonacci lattice on the unit sphere."""
    i = np.arange(n) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / n)
    azimuth = np.pi * (1.0 + 5.0 ** 0.5) * i
    return np.column_stack([np.cos(azimuth) * np.sin(polar),
                            np.sin(azimuth) * np.sin(polar),
                            np.cos(polar)])


def _circle(n=400, radius=400.0):
    a = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.column_stack([radius * np.cos(a), radius * np.sin(a), np.zeros(n)])


def test_sphere_at_origin():
    fit = ellipsoid_fit(473.27 * _sphere())
    np.testing.assert_allclose(fit.soft_iron, np.eye(3), atol=1e-9)
    np.testing.assert_allclose(fit.hard_iron, np.zeros(3), atol=1e-6)


def test_forward_model_round_trip(truth):
    A = truth.soft_iron()
    points = (np.linalg.norm(truth.m0) * _sphere() + truth.m_b) @ A.T
    fit = ellipsoid_fit(points)
    np.testing.assert_allclose(fit.hard_iron, A @ truth.m_b, atol=1e-6)
    k = np.sum(fit.soft_iron * A) / np.sum(fit.soft_iron * fit.soft_iron)
    np.testing.assert_allclose(k * fit.soft_iron, A, atol=1e-6)
    assert fit.algebraic_residual < 1e-12


def test_translation_shifts_hard_iron(truth):
    points = (400.0 * _sphere() + truth.m_b) @ truth.soft_iron().T
    d = np.array([35.0, -12.0, 80.0])
    np.testing.assert_allclose(ellipsoid_fit(points + d).hard_iron,
                               ellipsoid_fit(points).hard_iron + d, atol=1e-6)


def test_soft_iron_is_positive_definite(noisy_truth, rng):
    points = (473.0 * _sphere(2000) + noisy_truth.m_b) @ noisy_truth.soft_iron().T
    fit = ellipsoid_fit(points + rng.standard_normal(points.shape))
    np.testing.assert_allclose(fit.soft_iron, fit.soft_iron.T)
    assert np.all(np.linalg.eigvalsh(fit.soft_iron) > 0.0)


def test_state_corrects_onto_sphere(truth):
    points = (400.0 * _sphere() + truth.m_b) @ truth.soft_iron().T
    fit = ellipsoid_fit(points)
    norms = np.linalg.norm(correct_measurement(fit.to_state(), points), axis=1)
    np.testing.assert_allclose(norms, norms.mean(), rtol=1e-8)
    np.testing.assert_array_equal(fit.to_state().w_b, np.zeros(3))


def test_near_planar_cloud_is_not_an_ellipsoid(rng):
    points = _circle() + [10.0, 20.0, 30.0]
    points[:, 2] += rng.standard_normal(points.shape[0])
    with pytest.raises(NonEllipsoidError):
        ellipsoid_fit(points)


def test_planar_cloud_is_rank_deficient():
    with pytest.raises(InsufficientExcitationError):
        ellipsoid_fit(_circle() + [0.0, 0.0, 250.0])


@pytest.mark.parametrize('points', [np.ones((8, 3)), np.ones((20, 3))])
def test_degenerate_point_sets(points):
    with pytest.raises(InsufficientExcitationError):
        ellipsoid_fit(points)


def test_result_validation():
    with pytest.raises(ConfigurationError):
        EllipsoidFitResult(np.eye(3), [np.nan, 0.0, 0.0], 0.0)
