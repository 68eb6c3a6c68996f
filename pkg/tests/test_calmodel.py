import numpy as np
import pytest

from gyromag.calmodel import (DUPLICATION, CalibrationState, ProcessedSample,
                              ProcessedSamples, SoftIronTerms, correct_measurement,
                              is_positive_definite, norm_error, norm_jacobian,
                              residual, residual_jacobian, skew, terms_of,
                              to_matrix, unvec, vec)
from gyromag.exceptions import ConfigurationError, SingularPointError


def _numeric_jacobian(f, v, step=1e-6):
    columns = []
    for j in range(v.size):
        e = np.zeros_like(v)
        e[j] = step
        columns.append((f(v + e) - f(v - e)) / (2.0 * step))
    return np.stack(columns, axis=-1)


def _random_state(rng):
    c = np.array([1.0, 0.0, 0.0, 1.0, 0.0, 1.0]) + 0.2 * rng.standard_normal(6)
    return CalibrationState(c, 100.0 * rng.standard_normal(3), 0.01 * rng.standard_normal(3))


def _random_sample(rng):
    return ProcessedSample(0.0, 400.0 * rng.standard_normal(3), 300.0 * rng.standard_normal(3),
                           rng.standard_normal(3))


def test_skew_zero():
    np.testing.assert_array_equal(skew([0.0, 0.0, 0.0]), np.zeros((3, 3)))


def test_skew_cross_product():
    np.testing.assert_array_equal(skew([1.0, 2.0, 3.0]) @ [1.0, 0.0, 0.0], [0.0, 3.0, -2.0])


def test_skew_random(rng):
    for _ in range(20):
        v, u = rng.standard_normal(3), rng.standard_normal(3)
        S = skew(v)
        np.testing.assert_allclose(S @ u, np.cross(v, u), rtol=1e-14, atol=1e-14)
        np.testing.assert_array_equal(S, -S.T)
        np.testing.assert_allclose(S @ v, 0.0, atol=1e-15)


def test_skew_vectorised(rng):
    v = rng.standard_normal((5, 3))
    S = skew(v)
    assert S.shape == (5, 3, 3)
    np.testing.assert_array_equal(S[2], skew(v[2]))


def test_vec_is_column_major():
    M = np.arange(1.0, 10.0).reshape(3, 3)
    np.testing.assert_array_equal(vec(M), [1, 4, 7, 2, 5, 8, 3, 6, 9])
    np.testing.assert_array_equal(unvec(vec(M)), M)


def test_duplication_identity():
    np.testing.assert_array_equal(DUPLICATION @ [1, 0, 0, 1, 0, 1], vec(np.eye(3)))


def test_duplication_off_diagonal():
    expected = np.zeros((3, 3))
    expected[0, 1] = expected[1, 0] = 1.0
    np.testing.assert_array_equal(DUPLICATION @ [0, 1, 0, 0, 0, 0], vec(expected))


def test_duplication_random(rng):
    for _ in range(20):
        c = rng.standard_normal(6)
        M = to_matrix(c)
        np.testing.assert_array_equal(DUPLICATION @ c, vec(M))
        np.testing.assert_array_equal(M, M.T)


def test_terms_of_inverts_to_matrix(rng):
    c = rng.standard_normal(6)
    np.testing.assert_array_equal(terms_of(to_matrix(c)).c, c)


def test_terms_of_rejects_asymmetric():
    with pytest.raises(ConfigurationError):
        terms_of(np.arange(9.0).reshape(3, 3))


@pytest.mark.parametrize('values', [np.zeros(5), [1, 0, 0, 1, 0, np.nan]])
def test_soft_iron_terms_validation(values):
    with pytest.raises(ConfigurationError):
        SoftIronTerms(values)


def test_residual_static_instrument():
    s = ProcessedSample(0.0, [120.0, -40.0, 300.0], np.zeros(3), np.zeros(3))
    np.testing.assert_array_equal(residual(CalibrationState.identity(), s), np.zeros(3))


def test_residual_vanishes_at_truth(exact_wam, truth):
    x = truth.state()
    for s in exact_wam[::37]:
        assert np.linalg.norm(residual(x, s)) < 1e-9


def test_residual_batch_matches_single(exact_wam, truth):
    x = truth.state()
    batch = exact_wam[:10]
    errors, jacobians = residual(x, batch), residual_jacobian(x, batch)
    for i, s in enumerate(batch):
        np.testing.assert_allclose(errors[i], residual(x, s), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(jacobians[i], residual_jacobian(x, s),
                                   rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize('k', [0.5, 2.0])
def test_residual_scale(rng, k):
    x, s = _random_state(rng), _random_sample(rng)
    np.testing.assert_allclose(residual(x.scaled(k), s), k * residual(x, s),
                               rtol=1e-12, atol=1e-9)


def test_residual_jacobian_finite_differences(rng):
    for _ in range(100):
        x, s = _random_state(rng), _random_sample(rng)
        J = residual_jacobian(x, s)
        numeric = _numeric_jacobian(
            lambda v: residual(CalibrationState.from_vector(v), s), x.as_vector())
        assert J.shape == (3, 12)
        assert np.linalg.norm(J - numeric) <= 1e-6 * np.linalg.norm(J)


def test_residual_jacobian_without_rotation():
    w_b = np.array([0.01, -0.02, 0.03])
    x = CalibrationState(SoftIronTerms.identity(), [5.0, 6.0, 7.0], w_b)
    s = ProcessedSample(0.0, [100.0, 200.0, 300.0], np.zeros(3), w_b)
    J = residual_jacobian(x, s)
    np.testing.assert_array_equal(J[:, :9], np.zeros((3, 9)))


def test_residual_jacobian_gyro_block_by_hand():
    s = ProcessedSample(0.0, [1.0, 0.0, 0.0], np.zeros(3), [0.0, 0.0, 1.0])
    J = residual_jacobian(CalibrationState.identity(), s)
    np.testing.assert_array_equal(J[:, 9:], skew([1.0, 0.0, 0.0]))


@pytest.mark.parametrize('c, expected', [
    ([1, 0, 0, 0, 0, 0], 0.0),
    ([1, 0, 0, 1, 0, 1], np.sqrt(3.0) - 1.0),
    ([0, 0, 0, 0, 0, 0], -1.0),
])
def test_norm_error(c, expected):
    x = CalibrationState(c, np.zeros(3), np.zeros(3))
    assert norm_error(x) == pytest.approx(expected, abs=1e-15)


def test_norm_error_target():
    x = CalibrationState.identity()
    assert norm_error(x, target=np.sqrt(3.0)) == pytest.approx(0.0, abs=1e-15)


def test_norm_jacobian_unit_vector():
    x = CalibrationState([1, 0, 0, 0, 0, 0], np.zeros(3), np.zeros(3))
    expected = np.zeros((1, 12))
    expected[0, 0] = 1.0
    np.testing.assert_array_equal(norm_jacobian(x), expected)


def test_norm_jacobian_identity_terms():
    J = norm_jacobian(CalibrationState.identity())
    np.testing.assert_allclose(J[0, [0, 3, 5]], 1.0 / np.sqrt(3.0))
    np.testing.assert_array_equal(J[0, [1, 2, 4]], 0.0)
    np.testing.assert_array_equal(J[0, 6:], 0.0)
    assert np.linalg.norm(J) == pytest.approx(1.0)


def test_norm_jacobian_finite_differences(rng):
    for _ in range(20):
        x = _random_state(rng)
        numeric = _numeric_jacobian(
            lambda v: np.array([norm_error(CalibrationState.from_vector(v))]), x.as_vector())
        np.testing.assert_allclose(norm_jacobian(x), numeric, rtol=1e-8, atol=1e-8)


def test_norm_jacobian_singular_point():
    with pytest.raises(SingularPointError):
        norm_jacobian(CalibrationState(np.zeros(6), np.zeros(3), np.zeros(3)))


def test_correct_measurement_identity():
    m = np.array([227.0, 52.0, 412.0])
    np.testing.assert_array_equal(correct_measurement(CalibrationState.identity(), m), m)


def test_correct_measurement_offset_only():
    x = CalibrationState(SoftIronTerms.identity(), [20.0, 120.0, 90.0], np.zeros(3))
    np.testing.assert_array_equal(correct_measurement(x, np.zeros(3)), [-20.0, -120.0, -90.0])


def test_correct_measurement_inverts_forward_model(truth, rng):
    m_t = 300.0 * rng.standard_normal((50, 3))
    m_raw = (m_t + truth.m_b) @ truth.soft_iron().T
    np.testing.assert_allclose(correct_measurement(truth.state(), m_raw), m_t, atol=1e-9)


def test_state_from_soft_iron(truth):
    x = truth.state()
    np.testing.assert_allclose(x.soft_iron(), truth.soft_iron(), atol=1e-12)
    np.testing.assert_allclose(x.hard_iron(), truth.hard_iron(), atol=1e-10)
    np.testing.assert_array_equal(x.w_b, truth.w_b)
    assert is_positive_definite(x.inverse_soft_iron())


def test_state_vector_round_trip(rng):
    x = _random_state(rng)
    np.testing.assert_array_equal(CalibrationState.from_vector(x.as_vector()).as_vector(),
                                  x.as_vector())
    with pytest.raises(ConfigurationError):
        CalibrationState.from_vector(np.zeros(11))


def test_scaled_state_keeps_hard_iron(truth):
    x = truth.state()
    np.testing.assert_allclose(x.scaled(2.0).hard_iron(), x.hard_iron(), rtol=1e-12)
    np.testing.assert_allclose(x.scaled(2.0).soft_iron(), 0.5 * x.soft_iron(), rtol=1e-12)


def test_state_is_read_only():
    x = CalibrationState.identity()
    with pytest.raises(ValueError):
        x.m_b[0] = 1.0


def test_processed_samples_sequence(exact_wam):
    assert len(exact_wam) == 400
    assert isinstance(exact_wam[3], ProcessedSample)
    head = exact_wam[:5]
    assert isinstance(head, ProcessedSamples)
    assert len(head) == 5
    np.testing.assert_array_equal(head.m, exact_wam.m[:5])
    rebuilt = ProcessedSamples.from_samples(list(head))
    np.testing.assert_array_equal(rebuilt.m_dot, head.m_dot)
