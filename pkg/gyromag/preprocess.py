# -*- coding: utf-8 -*-

"""Window averaging and numeric differentiation of raw measurement streams."""
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from nipype import logging

from .calmodel import ProcessedSamples
from .exceptions import (ConfigurationError, DegenerateTimingError,
                         EmptyDatasetError, InsufficientDataError)

iflogger = logging.getLogger('nipype.interface')

DERIVATIVE_SCHEMES = ('central', 'forward')


@dataclass(frozen=True)
class PreprocessConfig(object):
    """Window length in samples (``None``: one second at the nominal rate)."""
    window: Optional[int] = None
    derivative_scheme: str = 'central'

    def __post_init__(self):
        if self.window is not None:
            if int(self.window) != self.window or self.window < 1:
                raise ConfigurationError('window must be a positive integer, got {}'.format(
                    self.window))
            object.__setattr__(self, 'window', int(self.window))
        if self.derivative_scheme not in DERIVATIVE_SCHEMES:
            raise ConfigurationError('unknown derivative scheme {!r}'.format(
                self.derivative_scheme))

    def resolve(self, t):
        if self.window is not None:
            return self
        return replace(self, window=default_window(t))


@dataclass(frozen=True, eq=False)
class AveragedSamples(object):
    t: np.ndarray
    m: np.ndarray
    w: np.ndarray

    def __len__(self):
        return self.t.shape[0]


def _columns(samples):
    if hasattr(samples, 't') and hasattr(samples, 'm') and hasattr(samples, 'w'):
        t, m, w = samples.t, samples.m, samples.w
    else:
        samples = list(samples)
        t = [s.t for s in samples]
        m = [s.m for s in samples]
        w = [s.w for s in samples]
    t = np.asarray(t, dtype=float).reshape(-1)
    n = t.shape[0]
    return t, np.asarray(m, dtype=float).reshape(n, 3), np.asarray(w, dtype=float).reshape(n, 3)


def nominal_rate(t):
    """Nominal sampling rate in Hz, from the median time step."""
    t = np.asarray(t, dtype=float)
    if t.shape[0] < 2:
        raise InsufficientDataError('at least two samples are needed to infer a rate')
    dt = float(np.median(np.diff(t)))
    if dt <= 0.0:
        raise DegenerateTimingError('time stamps are not strictly increasing')
    return 1.0 / dt


def default_window(t):
    return max(1, int(round(nominal_rate(t))))


def average_windows(samples, cfg=None):
    """Means over consecutive non-overlapping windows of ``cfg.window`` samples.

    A trailing partial window is discarded.
    """
    t, m, w = _columns(samples)
    if t.shape[0] == 0:
        raise EmptyDatasetError('no samples to preprocess')
    cfg = (cfg or PreprocessConfig()).resolve(t)
    window = cfg.window
    n = t.shape[0] // window
    if n == 0:
        raise InsufficientDataError('{} samples cannot fill a window of {}'.format(
            t.shape[0], window))
    dropped = t.shape[0] - n * window
    if dropped:
        iflogger.debug('dropping %d trailing samples of a partial window', dropped)
    stop = n * window
    return AveragedSamples(t[:stop].reshape(n, window).mean(axis=1),
                           m[:stop].reshape(n, window, 3).mean(axis=1),
                           w[:stop].reshape(n, window, 3).mean(axis=1))


def differentiate(avgs, scheme='central'):
    """Field derivative of window averages.

    ``central`` uses centred differences in the interior and one-sided
    differences at both ends; ``forward`` uses forward differences and a
    backward difference at the last sample.
    """
    if scheme not in DERIVATIVE_SCHEMES:
        raise ConfigurationError('unknown derivative scheme {!r}'.format(scheme))
    t, m, w = avgs.t, avgs.m, avgs.w
    n = t.shape[0]
    minimum = 3 if scheme == 'central' else 2
    if n < minimum:
        raise InsufficientDataError('{} averaged samples, {} needed for {} differences'.format(
            n, minimum, scheme))
    dt = np.diff(t)
    if np.any(dt <= 0.0):
        raise DegenerateTimingError('duplicate or decreasing time stamps in averaged samples')

    dm = np.diff(m, axis=0) / dt[:, None]
    m_dot = np.empty_like(m)
    if scheme == 'central':
        m_dot[1:-1] = (m[2:] - m[:-2]) / (t[2:] - t[:-2])[:, None]
        m_dot[0] = dm[0]
    else:
        m_dot[:-1] = dm
    m_dot[-1] = dm[-1]
    return ProcessedSamples(t, m, m_dot, w)


def check_length(samples, cfg=None):
    """Fails unless ``samples`` yields at least three averaged samples."""
    t, _, _ = _columns(samples)
    if t.shape[0] == 0:
        raise EmptyDatasetError('no samples to preprocess')
    cfg = (cfg or PreprocessConfig()).resolve(t)
    if t.shape[0] < 3 * cfg.window:
        raise InsufficientDataError(
            '{} samples are fewer than three windows of {}'.format(t.shape[0], cfg.window))
    return cfg


def preprocess(samples, cfg=None):
    """Window-averages ``samples`` and differentiates the averaged field."""
    cfg = check_length(samples, cfg)
    avgs = average_windows(samples, cfg)
    iflogger.info('preprocessed %d samples into %d windows of %d',
                  len(avgs) * cfg.window, len(avgs), cfg.window)
    return differentiate(avgs, cfg.derivative_scheme)
