# -*- coding: utf-8 -*-

"""Heading, field-magnitude and parameter-recovery metrics of a calibration."""
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from nipype import logging

from .calmodel import correct_measurement
from .exceptions import (GimbalLockError, MissingGroundTruthError,
                         NumericalFailureError)

iflogger = logging.getLogger('nipype.interface')

GIMBAL_TOL = 1e-9


def wrap_angle(a):
    """Wraps angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a, dtype=float), 2.0 * np.pi)


def heading_from_mag(m_cal, roll, pitch, declination=0.0):
    """Heading of the tilt-compensated field, in radians."""
    m = np.asarray(m_cal, dtype=float)
    roll = np.asarray(roll, dtype=float)
    pitch = np.asarray(pitch, dtype=float)
    if np.any(np.abs(np.cos(pitch)) < GIMBAL_TOL):
        raise GimbalLockError('heading is undefined at pitch +/-90 deg')
    sin_roll, cos_roll = np.sin(roll), np.cos(roll)
    sin_pitch, cos_pitch = np.sin(pitch), np.cos(pitch)
    # Ry(pitch) Rx(roll) m
    level_x = cos_pitch * m[..., 0] + sin_pitch * (sin_roll * m[..., 1] + cos_roll * m[..., 2])
    level_y = cos_roll * m[..., 1] - sin_roll * m[..., 2]
    return wrap_angle(np.arctan2(-level_y, level_x) + declination)


@dataclass(frozen=True, eq=False)
class HeadingStatistics(object):
    rmse_deg: float
    std_deg: float
    errors: np.ndarray
    estimated: np.ndarray


def _declination(dataset, declination):
    if declination is not None:
        return float(declination)
    if dataset.truth is not None:
        return dataset.truth.declination()
    iflogger.warning('no declination for %s, assuming 0', dataset.label or 'dataset')
    return 0.0


def heading_statistics(dataset, x, declination=None):
    """RMSE and standard deviation (deg) of the wrapped heading error."""
    if not dataset.has_attitude:
        raise MissingGroundTruthError('dataset {!r} has no attitude ground truth'.format(
            dataset.label))
    attitude = dataset.attitude
    estimated = heading_from_mag(correct_measurement(x, dataset.m), attitude[:, 0],
                                 attitude[:, 1], _declination(dataset, declination))
    errors = wrap_angle(estimated - attitude[:, 2])
    return HeadingStatistics(float(np.degrees(np.sqrt(np.mean(errors ** 2)))),
                             float(np.degrees(np.std(errors))), errors, estimated)


def heading_rmse(dataset, x, declination=None):
    return heading_statistics(dataset, x, declination).rmse_deg


def mag_field_std(dataset, x):
    """Std (mG) of corrected magnitudes rescaled to the mean raw magnitude."""
    corrected = np.linalg.norm(correct_measurement(x, dataset.m), axis=1)
    mean_corrected = np.mean(corrected)
    if not mean_corrected > 0.0:
        raise NumericalFailureError('corrected field has zero magnitude')
    return float(np.std(corrected * (np.mean(np.linalg.norm(dataset.m, axis=1)) / mean_corrected)))


@dataclass(frozen=True, eq=False)
class ParameterErrors(object):
    hard_iron: np.ndarray
    soft_iron: np.ndarray
    soft_iron_scale: float
    gyro_bias: np.ndarray


def parameter_errors(x, truth):
    """Absolute hard-iron, scale-aligned soft-iron and gyro-bias errors."""
    A = x.soft_iron()
    A_true = truth.soft_iron()
    scale = float(np.sum(A * A_true) / np.sum(A * A))
    return ParameterErrors(np.abs(x.hard_iron() - truth.hard_iron()),
                           np.abs(scale * A - A_true), scale,
                           np.abs(x.w_b - truth.w_b))


@dataclass(frozen=True, eq=False)
class EvaluationReport(object):
    method: str
    dataset: str
    heading_rmse: Optional[float] = None
    heading_std: Optional[float] = None
    mag_field_std: Optional[float] = None
    hard_iron_error: Optional[list] = None
    soft_iron_error: Optional[list] = None
    soft_iron_scale: Optional[float] = None
    gyro_bias_error: Optional[list] = None
    calibration: str = ''
    status: str = 'ok'
    error: Optional[dict] = None

    def __post_init__(self):
        for name in ('hard_iron_error', 'soft_iron_error', 'gyro_bias_error'):
            value = getattr(self, name)
            if value is not None:
                value = np.asarray(value, dtype=float)
                if np.any(value < 0.0):
                    raise ValueError('{} must be non-negative'.format(name))
                object.__setattr__(self, name, value.tolist())

    @classmethod
    def failed(cls, method, dataset, error, calibration=''):
        return cls(method, dataset, calibration=calibration, status='error', error=dict(error))

    @property
    def ok(self):
        return self.status != 'error'

    def as_dict(self):
        return asdict(self)


def evaluate(dataset, x, method, truth=None, declination=None, gyro_estimated=True,
             calibration='', stats=None):
    """Heading and field metrics of ``x`` on ``dataset``, plus parameter errors with truth.

    ``stats`` reuses heading statistics already computed for the same state.
    """
    if stats is None:
        stats = heading_statistics(dataset, x, declination)
    truth = truth or dataset.truth
    extra = {}
    if truth is not None:
        errors = parameter_errors(x, truth)
        extra = dict(hard_iron_error=errors.hard_iron, soft_iron_error=errors.soft_iron,
                     soft_iron_scale=errors.soft_iron_scale,
                     gyro_bias_error=errors.gyro_bias if gyro_estimated else None)
    report = EvaluationReport(method, dataset.label, stats.rmse_deg, stats.std_deg,
                              mag_field_std(dataset, x), calibration=calibration, **extra)
    iflogger.info('%s on %s: heading RMSE %.3f deg, field std %.3f mG', method,
                  dataset.label, report.heading_rmse, report.mag_field_std)
    return report


@dataclass
class SummaryCell(object):
    kind: str
    method: str
    runs: int = 0
    failures: int = 0
    heading_rmse: Optional[float] = None
    heading_std: Optional[float] = None
    mag_field_std: Optional[float] = None
    hard_iron_error: Optional[float] = None
    soft_iron_error: Optional[float] = None
    gyro_bias_error: Optional[float] = None
    errors: list = field(default_factory=list)

    @property
    def available(self):
        return self.runs > self.failures


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def summarize(reports):
    """Mean metrics per (calibration kind, method) cell, sorted by key.

    Vector errors are averaged as Euclidean norms and matrix errors as
    Frobenius norms; cells without a successful run stay N/A.
    """
    groups = defaultdict(list)
    for report in reports:
        groups[(report.calibration or report.dataset, report.method)].append(report)
    cells = []
    for (kind, method) in sorted(groups):
        group = groups[(kind, method)]
        good = [r for r in group if r.ok]
        cell = SummaryCell(kind, method, runs=len(group), failures=len(group) - len(good),
                           errors=sorted({r.error['kind'] for r in group if not r.ok}))
        if good:
            cell.heading_rmse = _mean(r.heading_rmse for r in good)
            cell.heading_std = _mean(r.heading_std for r in good)
            cell.mag_field_std = _mean(r.mag_field_std for r in good)
            cell.hard_iron_error = _mean(
                None if r.hard_iron_error is None else np.linalg.norm(r.hard_iron_error)
                for r in good)
            cell.soft_iron_error = _mean(
                None if r.soft_iron_error is None else np.linalg.norm(r.soft_iron_error)
                for r in good)
            cell.gyro_bias_error = _mean(
                None if r.gyro_bias_error is None else np.linalg.norm(r.gyro_bias_error)
                for r in good)
        cells.append(cell)
    return cells
