import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from gyromag import evaluation, sim
from gyromag.calmodel import CalibrationState
from gyromag.evaluation import (EvaluationReport, evaluate, heading_from_mag,
                                heading_rmse, heading_statistics, mag_field_std,
                                parameter_errors, summarize, wrap_angle)
from gyromag.exceptions import GimbalLockError, MissingGroundTruthError


@pytest.fixture
def clean(truth):
    return sim.synthesize(sim.profile_for('WAM', seed=6, duration=40.0), truth)


@pytest.fixture
def noisy(noisy_truth):
    return sim.synthesize(sim.profile_for('MAM', seed=6, duration=40.0), noisy_truth, seed=3)


@pytest.mark.parametrize('a, expected', [
    (0.0, 0.0), (np.pi, np.pi), (-np.pi, np.pi), (3 * np.pi, np.pi), (-0.5, -0.5),
    (2 * np.pi + 0.25, 0.25),
])
def test_wrap_angle(a, expected):
    assert wrap_angle(a) == pytest.approx(expected, abs=1e-12)


def test_level_heading():
    north = np.array([300.0, 0.0, 400.0])
    for psi in np.radians([0.0, 45.0, 135.0, -100.0, 179.0]):
        m = Rotation.from_euler('Z', psi).as_matrix().T @ north
        assert heading_from_mag(m, 0.0, 0.0) == pytest.approx(psi, abs=1e-12)


def test_tilt_compensation(rng):
    north = np.array([300.0, 0.0, 400.0])
    for _ in range(20):
        psi, theta, phi = rng.uniform(-np.pi, np.pi), rng.uniform(-1.4, 1.4), rng.uniform(-3, 3)
        R = Rotation.from_euler('ZYX', [psi, theta, phi]).as_matrix()
        estimated = heading_from_mag(R.T @ north, phi, theta)
        assert wrap_angle(estimated - psi) == pytest.approx(0.0, abs=1e-10)


def test_declination_offsets_heading():
    m = np.array([300.0, 0.0, 400.0])
    assert heading_from_mag(m, 0.0, 0.0, declination=0.3) == pytest.approx(0.3)


def test_heading_gimbal_lock():
    with pytest.raises(GimbalLockError):
        heading_from_mag([1.0, 0.0, 0.0], 0.0, np.pi / 2)


def test_truth_state_recovers_heading(clean, truth):
    stats = heading_statistics(clean, truth.state())
    assert stats.rmse_deg < 0.01
    assert stats.errors.shape == (len(clean),)
    assert mag_field_std(clean, truth.state()) < 1e-9


def test_raw_heading_is_biased(noisy):
    assert heading_rmse(noisy, CalibrationState.identity()) > 1.0


def test_missing_attitude(noisy):
    stripped = sim.Dataset(noisy.t, noisy.m, noisy.w, label='stripped')
    with pytest.raises(MissingGroundTruthError):
        heading_statistics(stripped, CalibrationState.identity())


@pytest.mark.parametrize('k', [0.5, 2.0])
def test_metrics_are_gauge_invariant(noisy, noisy_truth, k):
    x = CalibrationState.from_soft_iron(np.eye(3), [15.0, 100.0, 70.0], np.zeros(3))
    assert heading_rmse(noisy, x.scaled(k)) == pytest.approx(heading_rmse(noisy, x), rel=1e-9)
    assert mag_field_std(noisy, x.scaled(k)) == pytest.approx(mag_field_std(noisy, x), rel=1e-9)
    errors = parameter_errors(x.scaled(k), noisy_truth)
    np.testing.assert_allclose(errors.soft_iron, parameter_errors(x, noisy_truth).soft_iron,
                               atol=1e-12)


def test_parameter_errors_at_truth(truth):
    errors = parameter_errors(truth.state(), truth)
    np.testing.assert_allclose(errors.hard_iron, 0.0, atol=1e-10)
    np.testing.assert_allclose(errors.soft_iron, 0.0, atol=1e-12)
    np.testing.assert_array_equal(errors.gyro_bias, np.zeros(3))
    assert errors.soft_iron_scale == pytest.approx(1.0)


def test_parameter_errors_gyro_offset(truth):
    x = truth.state()
    shifted = CalibrationState(x.c, x.m_b, x.w_b + [0.001, 0.0, 0.0])
    np.testing.assert_allclose(parameter_errors(shifted, truth).gyro_bias, [0.001, 0.0, 0.0],
                               atol=1e-15)


def test_parameter_errors_scale(truth):
    assert parameter_errors(truth.state().scaled(2.0), truth).soft_iron_scale == \
        pytest.approx(2.0)


def test_evaluate_report(clean, truth):
    report = evaluate(clean, truth.state(), 'magyc-bfg', calibration='WAM')
    assert report.ok
    assert report.dataset == clean.label
    assert report.calibration == 'WAM'
    assert report.heading_rmse < 0.01
    assert len(report.soft_iron_error) == 3
    assert report.gyro_bias_error == [0.0, 0.0, 0.0]


def test_evaluate_reuses_heading_statistics(clean, truth, monkeypatch):
    stats = heading_statistics(clean, truth.state())

    def recompute(*args, **kwargs):
        raise AssertionError('heading statistics recomputed')

    monkeypatch.setattr(evaluation, 'heading_statistics', recompute)
    report = evaluate(clean, truth.state(), 'magyc-bfg', stats=stats)
    assert report.heading_rmse == stats.rmse_deg
    assert report.heading_std == stats.std_deg


def test_evaluate_without_gyro_or_truth(noisy):
    bare = sim.Dataset(noisy.t, noisy.m, noisy.w, attitude=noisy.attitude, label='bare')
    report = evaluate(bare, CalibrationState.identity(), 'raw', declination=0.0)
    assert report.hard_iron_error is None
    assert report.gyro_bias_error is None
    report = evaluate(noisy, CalibrationState.identity(), 'raw', gyro_estimated=False)
    assert report.hard_iron_error is not None
    assert report.gyro_bias_error is None


def test_report_rejects_negative_errors():
    with pytest.raises(ValueError):
        EvaluationReport('raw', 'evaluation', hard_iron_error=[-1.0, 0.0, 0.0])


def test_failed_report():
    report = EvaluationReport.failed('ellipsoid', 'evaluation',
                                     {'kind': 'non-ellipsoid', 'message': 'flat'},
                                     calibration='LAM')
    assert not report.ok
    assert report.heading_rmse is None
    assert report.as_dict()['error']['kind'] == 'non-ellipsoid'


def test_summarize():
    reports = [
        EvaluationReport('magyc-bfg', 'evaluation', 1.0, 0.5, 2.0, [3.0, 4.0, 0.0],
                         calibration='WAM'),
        EvaluationReport('magyc-bfg', 'evaluation', 3.0, 1.5, 4.0, [0.0, 0.0, 1.0],
                         calibration='WAM'),
        EvaluationReport.failed('ellipsoid', 'evaluation',
                                {'kind': 'non-ellipsoid', 'message': 'flat'},
                                calibration='LAM'),
    ]
    cells = summarize(reports)
    assert [(c.kind, c.method) for c in cells] == [('LAM', 'ellipsoid'), ('WAM', 'magyc-bfg')]
    failed, good = cells
    assert not failed.available
    assert failed.heading_rmse is None
    assert failed.errors == ['non-ellipsoid']
    assert good.runs == 2
    assert good.heading_rmse == pytest.approx(2.0)
    assert good.mag_field_std == pytest.approx(3.0)
    assert good.hard_iron_error == pytest.approx(3.0)
    assert good.gyro_bias_error is None
