# -*- coding: utf-8 -*-

"""Simulated sinusoidal attitude trajectories and corrupted sensor streams.

Attitudes follow the Z-Y-X (heading, pitch, roll) Euler convention; the
rotation ``R`` maps body-frame vectors into the world frame.
"""
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

import numpy as np
from nipype import logging
from scipy.spatial.transform import Rotation

from .calmodel import (CalibrationState, MeasurementSample, SoftIronTerms,
                       is_positive_definite, skew, vec3)
from .exceptions import (ConfigurationError, DegenerateTimingError,
                         GimbalLockError, TimeRangeError)

iflogger = logging.getLogger('nipype.interface')

KINDS = ('WAM', 'MAM', 'LAM')
# nominal (roll, pitch, heading) amplitudes in degrees
AMPLITUDES = {
    'WAM': (180.0, 180.0, 180.0),
    'MAM': (5.0, 45.0, 180.0),
    'LAM': (5.0, 15.0, 90.0),
}
# Hz; peak body rates stay below 0.3 rad/s
FREQUENCIES = (0.003, 0.005, 0.007)
# shared evaluation trajectory: full heading sweep, moderate pitch and roll
EVALUATION_AMPLITUDES = (5.0, 45.0, 180.0)
PITCH_LIMIT = 89.0
DURATION = 400.0
RATE = 25.0

FIELD = (227.0, 52.0, 412.0)
SOFT_IRON_TERMS = (1.10, 0.10, 0.04, 0.88, 0.02, 1.22)
PSEUDO_HARD_IRON = (20.0, 120.0, 90.0)
GYRO_BIAS = (0.004, -0.005, 0.002)
SIGMA_MAG = 1.0
SIGMA_GYRO = 0.005

GIMBAL_TOL = 1e-12
EVALUATION = 'evaluation'
# spawn keys of the datasets of one Monte Carlo run
STREAMS = {'WAM': 0, 'MAM': 1, 'LAM': 2, EVALUATION: 3}


def _triple(values, name):
    array = np.array(values, dtype=float)
    if array.shape != (3,) or not np.all(np.isfinite(array)):
        raise ConfigurationError('{} needs three finite values'.format(name))
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MotionProfile(object):
    """Per-axis (roll, pitch, heading) sinusoids: amplitude deg, frequency Hz, phase rad."""
    amplitudes: np.ndarray
    frequencies: np.ndarray = FREQUENCIES
    phases: np.ndarray = (0.0, 0.0, 0.0)
    duration: float = DURATION
    rate: float = RATE
    kind: str = 'custom'
    nominal_amplitudes: Optional[np.ndarray] = None

    def __post_init__(self):
        amplitudes = _triple(self.amplitudes, 'amplitudes')
        if np.any(amplitudes < 0.0):
            raise ConfigurationError('amplitudes must be non-negative')
        object.__setattr__(self, 'amplitudes', amplitudes)
        object.__setattr__(self, 'frequencies', _triple(self.frequencies, 'frequencies'))
        object.__setattr__(self, 'phases', _triple(self.phases, 'phases'))
        nominal = amplitudes if self.nominal_amplitudes is None else self.nominal_amplitudes
        object.__setattr__(self, 'nominal_amplitudes', _triple(nominal, 'nominal amplitudes'))
        if not self.duration > 0.0 or not self.rate > 0.0:
            raise ConfigurationError('duration and rate must be positive')
        object.__setattr__(self, 'duration', float(self.duration))
        object.__setattr__(self, 'rate', float(self.rate))

    @property
    def n_samples(self):
        return int(round(self.rate * self.duration))

    @property
    def clamped(self):
        return bool(np.any(self.amplitudes != self.nominal_amplitudes))

    def times(self):
        return np.arange(self.n_samples) / self.rate

    def as_dict(self):
        return {'kind': self.kind,
                'amplitudes_deg': self.amplitudes.tolist(),
                'nominal_amplitudes_deg': self.nominal_amplitudes.tolist(),
                'frequencies_hz': self.frequencies.tolist(),
                'phases_rad': self.phases.tolist(),
                'duration_s': self.duration,
                'rate_hz': self.rate,
                'pitch_clamped': self.clamped}

    @classmethod
    def from_dict(cls, d):
        return cls(amplitudes=d['amplitudes_deg'], frequencies=d['frequencies_hz'],
                   phases=d['phases_rad'], duration=d['duration_s'], rate=d['rate_hz'],
                   kind=d.get('kind', 'custom'),
                   nominal_amplitudes=d.get('nominal_amplitudes_deg'))


@dataclass(frozen=True, eq=False)
class SimulationTruth(object):
    m0: np.ndarray
    soft_iron_terms: SoftIronTerms
    m_b: np.ndarray
    w_b: np.ndarray
    sigma_mag: float = SIGMA_MAG
    sigma_gyro: float = SIGMA_GYRO

    def __post_init__(self):
        if not isinstance(self.soft_iron_terms, SoftIronTerms):
            object.__setattr__(self, 'soft_iron_terms', SoftIronTerms(self.soft_iron_terms))
        if not is_positive_definite(self.soft_iron_terms.to_matrix()):
            raise ConfigurationError('true soft-iron matrix must be positive definite')
        object.__setattr__(self, 'm0', vec3(self.m0, 'world field'))
        object.__setattr__(self, 'm_b', vec3(self.m_b, 'pseudo-hard-iron'))
        object.__setattr__(self, 'w_b', vec3(self.w_b, 'gyroscope bias'))
        if self.sigma_mag < 0.0 or self.sigma_gyro < 0.0:
            raise ConfigurationError('noise levels must be non-negative')
        object.__setattr__(self, 'sigma_mag', float(self.sigma_mag))
        object.__setattr__(self, 'sigma_gyro', float(self.sigma_gyro))

    def soft_iron(self):
        return self.soft_iron_terms.to_matrix()

    def hard_iron(self):
        return self.soft_iron() @ self.m_b

    def state(self):
        """Calibration state that inverts the forward model exactly."""
        return CalibrationState.from_soft_iron(self.soft_iron(), self.hard_iron(), self.w_b)

    def declination(self):
        return float(np.arctan2(self.m0[1], self.m0[0]))

    def with_noise(self, sigma_mag, sigma_gyro):
        return replace(self, sigma_mag=sigma_mag, sigma_gyro=sigma_gyro)


def benchmark_truth(sigma_mag=SIGMA_MAG, sigma_gyro=SIGMA_GYRO):
    """Biases, soft-iron and local field of the desk-scale benchmark."""
    return SimulationTruth(FIELD, SOFT_IRON_TERMS, PSEUDO_HARD_IRON, GYRO_BIAS,
                           sigma_mag, sigma_gyro)


@dataclass(frozen=True, eq=False)
class Dataset(object):
    """Raw measurement stream with optional attitude ground truth (roll, pitch, heading)."""
    t: np.ndarray
    m: np.ndarray
    w: np.ndarray
    attitude: Optional[np.ndarray] = None
    truth: Optional[SimulationTruth] = None
    label: str = ''
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.array(self.t, dtype=float).reshape(-1)
        n = t.shape[0]
        columns = {'t': t, 'm': np.array(self.m, dtype=float).reshape(n, 3),
                   'w': np.array(self.w, dtype=float).reshape(n, 3)}
        if self.attitude is not None:
            columns['attitude'] = np.array(self.attitude, dtype=float).reshape(n, 3)
        for name, array in columns.items():
            if not np.all(np.isfinite(array)):
                raise ConfigurationError('dataset column {} holds non-finite values'.format(name))
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        if np.any(np.diff(t) <= 0.0):
            raise DegenerateTimingError('dataset time stamps are not strictly increasing')

    def __len__(self):
        return self.t.shape[0]

    @property
    def has_attitude(self):
        return self.attitude is not None

    @cached_property
    def samples(self):
        return tuple(MeasurementSample(t, m, w) for t, m, w in zip(self.t, self.m, self.w))


def profile_for(kind, seed=0, frequencies=FREQUENCIES, duration=DURATION, rate=RATE):
    """Sinusoidal profile of a benchmark kind with phases drawn from ``seed``."""
    key = str(kind).upper()
    if key not in AMPLITUDES:
        raise ConfigurationError('unknown motion kind {!r}, expected one of {}'.format(
            kind, ', '.join(KINDS)))
    nominal = AMPLITUDES[key]
    amplitudes = (nominal[0], min(nominal[1], PITCH_LIMIT), nominal[2])
    phases = np.random.default_rng(seed).uniform(-np.pi, np.pi, 3)
    return MotionProfile(amplitudes, frequencies, phases, duration, rate, key, nominal)


def evaluation_profile(seed=0, frequencies=FREQUENCIES, duration=DURATION, rate=RATE):
    """Profile of the evaluation dataset shared by every calibration of a run."""
    phases = np.random.default_rng(seed).uniform(-np.pi, np.pi, 3)
    return MotionProfile(EVALUATION_AMPLITUDES, frequencies, phases, duration, rate, EVALUATION)


def _check_times(p, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > p.duration):
        raise TimeRangeError('time outside the profile span [0, {}] s'.format(p.duration))
    return t


def _arguments(p, t):
    return 2.0 * np.pi * p.frequencies * t[..., None] + p.phases


def attitude_at(p, t):
    """(roll, pitch, heading) in radians; ``t`` may be a scalar or an array."""
    t = _check_times(p, t)
    return np.radians(p.amplitudes) * np.sin(_arguments(p, t))


def euler_rates_at(p, t):
    t = _check_times(p, t)
    return np.radians(p.amplitudes) * 2.0 * np.pi * p.frequencies * np.cos(_arguments(p, t))


def _body_rates(angles, rates):
    roll, pitch = angles[..., 0], angles[..., 1]
    d_roll, d_pitch, d_heading = rates[..., 0], rates[..., 1], rates[..., 2]
    cos_pitch = np.cos(pitch)
    if np.any(np.abs(cos_pitch) < GIMBAL_TOL):
        raise GimbalLockError('pitch reaches +/-90 deg, Euler rates are singular')
    return np.stack([
        d_roll - d_heading * np.sin(pitch),
        d_pitch * np.cos(roll) + d_heading * np.sin(roll) * cos_pitch,
        -d_pitch * np.sin(roll) + d_heading * np.cos(roll) * cos_pitch,
    ], axis=-1)


def angular_rate_at(p, t):
    """Exact body-frame angular rate (rad/s) of the profile."""
    return _body_rates(attitude_at(p, t), euler_rates_at(p, t))


def _rotations(angles):
    return Rotation.from_euler('ZYX', angles[..., ::-1]).as_matrix()


def rotation_at(p, t):
    """World-from-body rotation matrices."""
    return _rotations(attitude_at(p, t))


def field_rate(p, truth, t):
    """Noise-free derivative of the measured field, -A [w]x m_t."""
    R = rotation_at(p, t)
    m_t = np.einsum('...ji,j->...i', R, truth.m0)
    w_t = angular_rate_at(p, t)
    return -np.einsum('...ij,...j->...i', skew(w_t), m_t) @ truth.soft_iron().T


def synthesize(p, truth, seed=0, label=None):
    """Forward sensor model m = A (R^T m0 + m_b) + noise, w = w_t + w_b + noise."""
    t = p.times()
    angles = attitude_at(p, t)
    m_t = np.einsum('nji,j->ni', _rotations(angles), truth.m0)
    w_t = _body_rates(angles, euler_rates_at(p, t))

    rng = np.random.default_rng(seed)
    mag_noise = rng.standard_normal(m_t.shape) * truth.sigma_mag
    gyro_noise = rng.standard_normal(w_t.shape) * truth.sigma_gyro

    m = (m_t + truth.m_b) @ truth.soft_iron().T + mag_noise
    w = w_t + truth.w_b + gyro_noise
    if p.clamped:
        iflogger.debug('%s pitch amplitude clamped to %.1f deg', p.kind, p.amplitudes[1])
    metadata = {'kind': p.kind, 'seed': int(seed), 'pitch_clamped': p.clamped,
                'profile': p.as_dict()}
    return Dataset(t, m, w, attitude=angles, truth=truth,
                   label=label or p.kind.lower(), metadata=metadata)


def run_seeds(seed, run):
    """(profile seed, noise seed) of every dataset of Monte Carlo run ``run``."""
    seeds = {}
    for label, key in STREAMS.items():
        state = np.random.SeedSequence(seed, spawn_key=(run, key)).generate_state(2)
        seeds[label] = (int(state[0]), int(state[1]))
    return seeds


@dataclass(frozen=True, eq=False)
class MonteCarloRun(object):
    run: int
    calibration: dict
    evaluation: Dataset

    @property
    def datasets(self):
        return list(self.calibration.values()) + [self.evaluation]


def simulate_run(run, seed=0, kinds=KINDS, truth=None, duration=DURATION, rate=RATE):
    """Calibration datasets of ``kinds`` and the shared evaluation dataset of one run."""
    truth = truth or benchmark_truth()
    seeds = run_seeds(seed, run)
    calibration = {}
    for kind in kinds:
        kind = str(kind).upper()
        profile_seed, noise_seed = seeds.get(kind, (None, None))
        if profile_seed is None:
            raise ConfigurationError('unknown motion kind {!r}'.format(kind))
        p = profile_for(kind, profile_seed, duration=duration, rate=rate)
        calibration[kind] = synthesize(p, truth, noise_seed, label=kind.lower())
    profile_seed, noise_seed = seeds[EVALUATION]
    p = evaluation_profile(profile_seed, duration=duration, rate=rate)
    evaluation = synthesize(p, truth, noise_seed, label=EVALUATION)
    return MonteCarloRun(run, calibration, evaluation)


def monte_carlo(kinds=KINDS, truth=None, runs=1, seed=0):
    """Per run: one calibration dataset per kind plus one shared evaluation dataset."""
    if runs < 1:
        raise ConfigurationError('runs must be at least 1')
    return [simulate_run(run, seed, kinds, truth) for run in range(runs)]
