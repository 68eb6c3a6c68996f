# -*- coding: utf-8 -*-

"""Closed-form math of the attitude-free magnetometer and gyroscope model.

The calibration state is parameterised by the unique upper-triangular terms
``c`` of the inverse soft-iron matrix ``C = A^-1``, the pseudo-hard-iron
``m_b`` and the gyroscope bias ``w_b``.  For a window-averaged sample with
field ``m``, numeric field derivative ``m_dot`` and angular rate ``w`` the
model residual is::

    h(x) = [w - w_b]x (C m - m_b) + C m_dot

which vanishes for the true parameters whatever the instrument attitude.

Units are fixed across the package: milligauss, rad/s and seconds.  Every
function accepts either a single sample (vectors of shape ``(3,)``) or a
columnar batch (arrays of shape ``(n, 3)``).
"""
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, SingularPointError

# (row, column) of each soft-iron term, in state order
TERM_INDEX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
N_PARAMS = 12
C_BLOCK = slice(0, 6)
MB_BLOCK = slice(6, 9)
WB_BLOCK = slice(9, 12)


def _frozen(values, shape=None, name='value'):
    array = np.array(values, dtype=float)
    if shape is not None and array.shape != shape:
        raise ConfigurationError('{} must have shape {}, got {}'.format(
            name, shape, array.shape))
    if not np.all(np.isfinite(array)):
        raise ConfigurationError('{} must be finite'.format(name))
    array.setflags(write=False)
    return array


def vec3(values, name='vector'):
    return _frozen(values, (3,), name)


def mat3(values, name='matrix'):
    return _frozen(values, (3, 3), name)


def is_symmetric(M, tol=1e-12):
    M = np.asarray(M, dtype=float)
    return np.allclose(M, M.T, rtol=0.0, atol=tol * max(1.0, np.abs(M).max()))


def is_positive_definite(M):
    if not is_symmetric(M):
        return False
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return False
    return True


def skew(v):
    """Skew-symmetric matrix with ``skew(v) @ u == cross(v, u)``."""
    v = np.asarray(v, dtype=float)
    S = np.zeros(v.shape[:-1] + (3, 3))
    S[..., 0, 1] = -v[..., 2]
    S[..., 0, 2] = v[..., 1]
    S[..., 1, 0] = v[..., 2]
    S[..., 1, 2] = -v[..., 0]
    S[..., 2, 0] = -v[..., 1]
    S[..., 2, 1] = v[..., 0]
    return S


def vec(M):
    """Column-stacking vec operator."""
    M = np.asarray(M, dtype=float)
    return np.swapaxes(M, -1, -2).reshape(M.shape[:-2] + (9,))


def unvec(v):
    v = np.asarray(v, dtype=float)
    return np.swapaxes(v.reshape(v.shape[:-1] + (3, 3)), -1, -2)


def duplication_map():
    """Constant 9x6 matrix ``D`` with ``vec(to_matrix(c)) == D @ c``."""
    D = np.zeros((9, 6))
    for j, (row, col) in enumerate(TERM_INDEX):
        D[3 * col + row, j] = 1.0
        D[3 * row + col, j] = 1.0
    return D


DUPLICATION = duplication_map()
DUPLICATION.setflags(write=False)


@dataclass(frozen=True, eq=False)
class SoftIronTerms(object):
    """Unique upper-triangular terms (c00, c01, c02, c11, c12, c22)."""
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'c', _frozen(self.c, (6,), 'soft-iron terms'))

    @classmethod
    def identity(cls):
        return cls([1.0, 0.0, 0.0, 1.0, 0.0, 1.0])

    def to_matrix(self):
        return unvec(DUPLICATION @ self.c)

    def norm(self):
        return float(np.linalg.norm(self.c))


def to_matrix(terms):
    if not isinstance(terms, SoftIronTerms):
        terms = SoftIronTerms(terms)
    return terms.to_matrix()


def terms_of(M):
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or not is_symmetric(M, tol=1e-9):
        raise ConfigurationError('soft-iron matrix must be symmetric 3x3')
    return SoftIronTerms([M[row, col] for row, col in TERM_INDEX])


@dataclass(frozen=True, eq=False)
class MeasurementSample(object):
    t: float
    m: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 't', float(self.t))
        object.__setattr__(self, 'm', vec3(self.m, 'magnetic field'))
        object.__setattr__(self, 'w', vec3(self.w, 'angular rate'))


@dataclass(frozen=True, eq=False)
class ProcessedSample(object):
    t: float
    m: np.ndarray
    m_dot: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 't', float(self.t))
        object.__setattr__(self, 'm', vec3(self.m, 'magnetic field'))
        object.__setattr__(self, 'm_dot', vec3(self.m_dot, 'field derivative'))
        object.__setattr__(self, 'w', vec3(self.w, 'angular rate'))


class ProcessedSamples(Sequence):
    """Immutable columnar sequence of :class:`ProcessedSample`."""

    def __init__(self, t, m, m_dot, w):
        t = np.array(t, dtype=float).reshape(-1)
        n = t.shape[0]
        self.t = _frozen(t, (n,), 'time')
        self.m = _frozen(np.reshape(m, (n, 3)), (n, 3), 'magnetic field')
        self.m_dot = _frozen(np.reshape(m_dot, (n, 3)), (n, 3), 'field derivative')
        self.w = _frozen(np.reshape(w, (n, 3)), (n, 3), 'angular rate')

    @classmethod
    def from_samples(cls, samples):
        samples = list(samples)
        if not samples:
            return cls(np.zeros(0), np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 3)))
        return cls([s.t for s in samples], [s.m for s in samples],
                   [s.m_dot for s in samples], [s.w for s in samples])

    def __len__(self):
        return self.t.shape[0]

    def __getitem__(self, index):
        if isinstance(index, slice):
            return ProcessedSamples(self.t[index], self.m[index],
                                    self.m_dot[index], self.w[index])
        return ProcessedSample(self.t[index], self.m[index],
                               self.m_dot[index], self.w[index])


@dataclass(frozen=True, eq=False)
class CalibrationState(object):
    """Single-node state: inverse soft-iron terms, pseudo-hard-iron, gyro bias."""
    c: SoftIronTerms
    m_b: np.ndarray
    w_b: np.ndarray

    def __post_init__(self):
        if not isinstance(self.c, SoftIronTerms):
            object.__setattr__(self, 'c', SoftIronTerms(self.c))
        object.__setattr__(self, 'm_b', vec3(self.m_b, 'pseudo-hard-iron'))
        object.__setattr__(self, 'w_b', vec3(self.w_b, 'gyroscope bias'))

    @classmethod
    def identity(cls):
        """Initial guess: calibrated magnetometer and gyroscope."""
        return cls(SoftIronTerms.identity(), np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (N_PARAMS,):
            raise ConfigurationError('state vector must have 12 entries')
        return cls(v[C_BLOCK], v[MB_BLOCK], v[WB_BLOCK])

    @classmethod
    def from_soft_iron(cls, A, hard_iron=None, w_b=None):
        """State reproducing the model m = A (m_t + m_b) with hard-iron A m_b."""
        A = np.asarray(A, dtype=float)
        try:
            C = np.linalg.inv(A)
        except np.linalg.LinAlgError:
            raise SingularPointError('soft-iron matrix is singular')
        C = 0.5 * (C + C.T)
        hard_iron = np.zeros(3) if hard_iron is None else np.asarray(hard_iron, dtype=float)
        w_b = np.zeros(3) if w_b is None else w_b
        return cls(terms_of(C), C @ hard_iron, w_b)

    def as_vector(self):
        return np.concatenate([self.c.c, self.m_b, self.w_b])

    def scaled(self, k):
        """Gauge transformation (k c, k m_b, w_b)."""
        return CalibrationState(k * self.c.c, k * self.m_b, self.w_b)

    def inverse_soft_iron(self):
        return self.c.to_matrix()

    def soft_iron(self):
        try:
            return np.linalg.inv(self.inverse_soft_iron())
        except np.linalg.LinAlgError:
            raise SingularPointError('inverse soft-iron matrix is singular')

    def hard_iron(self):
        return self.soft_iron() @ self.m_b


def residual(x, s):
    """Attitude-free model residual in mG/s."""
    C = x.inverse_soft_iron()
    corrected = np.asarray(s.m) @ C.T - x.m_b
    return np.cross(np.asarray(s.w) - x.w_b, corrected) + np.asarray(s.m_dot) @ C.T


def residual_jacobian(x, s):
    """Analytic 3x12 Jacobian blocks [dh/dc | dh/dm_b | dh/dw_b]."""
    C = x.inverse_soft_iron()
    m = np.asarray(s.m, dtype=float)
    m_dot = np.asarray(s.m_dot, dtype=float)
    rate = skew(np.asarray(s.w, dtype=float) - x.w_b)
    batch = rate.shape[:-2]

    # (m^T kron [w - w_b]x + m_dot^T kron I3), laid out as [i, 3 j + k]
    d_vec_c = np.einsum('...j,...ik->...ijk', m, rate).reshape(batch + (3, 9))
    d_vec_c = d_vec_c + np.einsum('...j,ik->...ijk', m_dot, np.eye(3)).reshape(batch + (3, 9))

    J = np.empty(batch + (3, N_PARAMS))
    J[..., C_BLOCK] = d_vec_c @ DUPLICATION
    J[..., MB_BLOCK] = -rate
    J[..., WB_BLOCK] = skew(m @ C.T - x.m_b)
    return J


def norm_error(x, target=1.0):
    return x.c.norm() - target


def norm_jacobian(x):
    norm = x.c.norm()
    if norm == 0.0:
        raise SingularPointError('soft-iron norm Jacobian is undefined at c = 0')
    J = np.zeros((1, N_PARAMS))
    J[0, C_BLOCK] = x.c.c / norm
    return J


def correct_measurement(x, m_raw):
    """Calibrated field C m_raw - m_b (up to the global scale gauge)."""
    return np.asarray(m_raw, dtype=float) @ x.inverse_soft_iron().T - x.m_b
