# -*- coding: utf-8 -*-

"""Ellipsoid Fit baseline: algebraic quadric fit of the raw field cloud."""
from dataclasses import dataclass

import numpy as np
from nipype import logging

from .calmodel import CalibrationState, mat3, terms_of, vec3
from .exceptions import InsufficientExcitationError, NonEllipsoidError

iflogger = logging.getLogger('nipype.interface')

MIN_POINTS = 9
RANK_TOL = 1e-10
AXIS_RATIO_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class EllipsoidFitResult(object):
    soft_iron: np.ndarray
    hard_iron: np.ndarray
    algebraic_residual: float

    def __post_init__(self):
        object.__setattr__(self, 'soft_iron', mat3(self.soft_iron, 'soft-iron'))
        object.__setattr__(self, 'hard_iron', vec3(self.hard_iron, 'hard-iron'))

    @property
    def correction(self):
        return np.linalg.inv(self.soft_iron)

    def to_state(self):
        C = self.correction
        C = 0.5 * (C + C.T)
        return CalibrationState(terms_of(C), C @ self.hard_iron, np.zeros(3))


def _design_matrix(u):
    x, y, z = u[:, 0], u[:, 1], u[:, 2]
    return np.column_stack([x * x, y * y, z * z, 2 * x * y, 2 * x * z, 2 * y * z,
                            2 * x, 2 * y, 2 * z, np.ones_like(x)])


def _symmetric_sqrt(Q):
    eigvals, eigvecs = np.linalg.eigh(Q)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def ellipsoid_fit(mags):
    """Fits x^T Q x + 2 q^T x + k = 0 to ``mags`` and returns the correction.

    The hard-iron is the quadric centre; the soft-iron is the inverse of the
    symmetric square root of the normalised Q, scaled so the mean corrected
    magnitude equals the mean raw magnitude.
    """
    points = np.asarray(mags, dtype=float).reshape(-1, 3)
    if points.shape[0] < MIN_POINTS:
        raise InsufficientExcitationError('{} points, at least {} are needed'.format(
            points.shape[0], MIN_POINTS))

    origin = points.mean(axis=0)
    spread = np.sqrt(np.mean(np.sum((points - origin) ** 2, axis=1)))
    if spread == 0.0:
        raise InsufficientExcitationError('all field samples coincide')
    u = (points - origin) / spread

    _, s, vt = np.linalg.svd(_design_matrix(u), full_matrices=False)
    if s[-2] <= RANK_TOL * s[0]:
        raise InsufficientExcitationError('quadric design matrix is rank deficient')
    v = vt[-1]
    Q = np.array([[v[0], v[3], v[4]],
                  [v[3], v[1], v[5]],
                  [v[4], v[5], v[2]]])
    q, k = v[6:9], v[9]
    if np.trace(Q) < 0.0:
        Q, q, k = -Q, -q, -k

    eigvals = np.linalg.eigvalsh(Q)
    if eigvals[0] <= 0.0 or eigvals[0] < AXIS_RATIO_TOL * eigvals[-1]:
        raise NonEllipsoidError('fitted quadric is not an ellipsoid (axis eigenvalues {})'.format(
            np.array2string(eigvals, precision=3)))
    centre = -np.linalg.solve(Q, q)
    radius = q @ np.linalg.solve(Q, q) - k
    if radius <= 0.0:
        raise NonEllipsoidError('fitted quadric is imaginary')

    hard_iron = origin + spread * centre
    W = _symmetric_sqrt(Q / (radius * spread ** 2))
    corrected = (points - hard_iron) @ W.T
    W = W * (np.mean(np.linalg.norm(points, axis=1)) /
             np.mean(np.linalg.norm(corrected, axis=1)))
    soft_iron = np.linalg.inv(W)
    soft_iron = 0.5 * (soft_iron + soft_iron.T)
    iflogger.debug('ellipsoid fit residual %.3e', s[-1] / s[0])
    return EllipsoidFitResult(soft_iron, hard_iron, float(s[-1] / s[0]))
