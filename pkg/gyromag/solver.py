# -*- coding: utf-8 -*-

"""Single-node factor graph and its damped least-squares optimisation.

Every processed sample contributes a residual factor and a soft-iron norm
factor to one variable node holding the 12-parameter calibration state.
The graph is solved in batch by Levenberg-Marquardt on the dense 12x12
normal equations, or incrementally with warm-started updates as factor
pairs arrive.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from nipype import logging
from scipy import linalg, optimize

from .calmodel import (N_PARAMS, CalibrationState, ProcessedSamples,
                       is_positive_definite, norm_error, norm_jacobian,
                       residual, residual_jacobian)
from .exceptions import (CalibrationFailedError, ConfigurationError,
                         DegenerateMotionError, EmptyDatasetError,
                         NumericalError, NumericalFailureError)

iflogger = logging.getLogger('nipype.interface')

BACKENDS = ('lm', 'scipy')
DAMPING_UP = 10.0
DAMPING_DOWN = 3.0
DIAGONAL_FLOOR = 1e-12
OBSERVABILITY_TOL = 1e-10
MAX_CONDITION = 1e8
LAST_FRACTION = 0.2


@dataclass(frozen=True, eq=False)
class NoiseModel(object):
    """Gaussian covariances of the residual (3x3) and norm (scalar) factors."""
    sigma_residual: np.ndarray = field(default_factory=lambda: 0.001 * np.eye(3))
    sigma_norm: float = 0.01
    residual_whitener: np.ndarray = field(init=False, repr=False)
    norm_whitener: float = field(init=False, repr=False)

    def __post_init__(self):
        cov = np.array(self.sigma_residual, dtype=float)
        if cov.ndim == 0:
            cov = cov * np.eye(3)
        if cov.shape != (3, 3) or not np.all(np.isfinite(cov)) or not is_positive_definite(cov):
            raise ConfigurationError('residual covariance must be symmetric positive definite')
        if not self.sigma_norm > 0.0:
            raise ConfigurationError('norm covariance must be positive')
        # L^-1 with cov = L L^T
        whitener = linalg.solve_triangular(linalg.cholesky(cov, lower=True), np.eye(3),
                                           lower=True)
        cov.setflags(write=False)
        whitener.setflags(write=False)
        object.__setattr__(self, 'sigma_residual', cov)
        object.__setattr__(self, 'sigma_norm', float(self.sigma_norm))
        object.__setattr__(self, 'residual_whitener', whitener)
        object.__setattr__(self, 'norm_whitener', 1.0 / math.sqrt(self.sigma_norm))


class Factor(object):
    """Unary factor on the calibration state with a whitened evaluation."""
    kind = None
    dim = 0

    def evaluate(self, x):
        """Whitened (error, Jacobian) of shapes (dim,) and (dim, 12)."""
        raise NotImplementedError

    def error(self, x):
        return self.evaluate(x)[0]


class ResidualFactor(Factor):
    kind = 'residual'
    dim = 3

    def __init__(self, sample, whitener):
        self.sample = sample
        self.whitener = np.asarray(whitener, dtype=float)

    def error(self, x):
        return self.whitener @ residual(x, self.sample)

    def evaluate(self, x):
        return self.error(x), self.whitener @ residual_jacobian(x, self.sample)


class NormFactor(Factor):
    kind = 'norm'
    dim = 1

    def __init__(self, whitener, target=1.0):
        self.whitener = float(whitener)
        self.target = float(target)

    def error(self, x):
        return np.array([self.whitener * norm_error(x, self.target)])

    def evaluate(self, x):
        return self.error(x), self.whitener * norm_jacobian(x)


class FactorGraph(object):
    """One variable node and an ordered list of unary factors."""

    def __init__(self, node=None):
        self.node = node if node is not None else CalibrationState.identity()
        self._factors = []
        self._stack = None

    @property
    def factors(self):
        return tuple(self._factors)

    def __len__(self):
        return len(self._factors)

    def add(self, factor):
        if not isinstance(factor, Factor):
            raise TypeError('expected a Factor, got {!r}'.format(factor))
        self._factors.append(factor)
        self._stack = None

    def add_sample(self, sample, noise=None, norm_target=1.0):
        """Adds the (residual, norm) factor pair of one processed sample."""
        noise = noise or NoiseModel()
        self.add(ResidualFactor(sample, noise.residual_whitener))
        self.add(NormFactor(noise.norm_whitener, norm_target))

    def _stacked(self):
        if self._stack is None:
            residuals = [f for f in self._factors if isinstance(f, ResidualFactor)]
            norms = [f for f in self._factors if isinstance(f, NormFactor)]
            self._stack = (
                ProcessedSamples.from_samples(f.sample for f in residuals),
                np.array([f.whitener for f in residuals]).reshape(-1, 3, 3),
                np.array([f.whitener for f in norms], dtype=float),
                np.array([f.target for f in norms], dtype=float),
            )
        return self._stack

    def whitened_errors(self, x):
        samples, whiteners, weights, targets = self._stacked()
        errors = [np.einsum('kij,kj->ki', whiteners, residual(x, samples)).reshape(-1),
                  weights * norm_error(x, targets)]
        return np.concatenate(errors)

    def whitened_system(self, x):
        """Stacked whitened errors and Jacobian, residual factors first."""
        samples, whiteners, weights, targets = self._stacked()
        errors = self.whitened_errors(x)
        jacobian = np.einsum('kij,kjl->kil', whiteners,
                             residual_jacobian(x, samples)).reshape(-1, N_PARAMS)
        if len(targets):
            jacobian = np.vstack([jacobian, weights[:, None] * norm_jacobian(x)])
        return errors, jacobian

    def cost(self, x):
        errors = self.whitened_errors(x)
        return 0.5 * float(errors @ errors)

    def linearize(self, x):
        """Whitened normal equations (H, g, cost) at ``x``."""
        errors, jacobian = self.whitened_system(x)
        return jacobian.T @ jacobian, jacobian.T @ errors, 0.5 * float(errors @ errors)


def build_graph(samples, noise=None, cfg=None):
    """One residual and one norm factor per processed sample."""
    noise = noise or NoiseModel()
    cfg = cfg or SolverConfig()
    samples = list(samples)
    if not samples:
        raise EmptyDatasetError('no processed samples to build a graph from')
    graph = FactorGraph()
    for sample in samples:
        graph.add_sample(sample, noise, cfg.norm_target)
    return graph


def total_cost(graph, x):
    return graph.cost(x)


@dataclass(frozen=True)
class SolverConfig(object):
    rel_tol: float = 1e-7
    abs_tol: float = 1e-7
    max_iters: int = 200
    initial_damping: float = 1e-4
    norm_target: float = 1.0
    update_iters: int = 5
    warmup_samples: int = 10
    min_damping: float = 1e-12
    max_damping: float = 1e6
    check_observability: bool = True
    backend: str = 'lm'

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ConfigurationError('tolerances must be positive')
        for name in ('max_iters', 'update_iters', 'warmup_samples'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigurationError('{} must be a positive integer'.format(name))
            object.__setattr__(self, name, int(value))
        if not 0.0 < self.min_damping <= self.initial_damping <= self.max_damping:
            raise ConfigurationError('damping must satisfy 0 < min <= initial <= max')
        if not self.norm_target > 0.0:
            raise ConfigurationError('norm target must be positive')
        if self.backend not in BACKENDS:
            raise ConfigurationError('unknown solver backend {!r}'.format(self.backend))


@dataclass(frozen=True, eq=False)
class CalibrationResult(object):
    soft_iron: np.ndarray
    hard_iron: np.ndarray
    gyro_bias: Optional[np.ndarray]
    state: CalibrationState
    method: str = ''
    final_cost: Optional[float] = None
    converged: bool = True
    iterations: int = 0
    state_history: tuple = ()
    held: tuple = ()

    @property
    def status(self):
        return 'ok' if self.converged else 'not-converged'


def extract_result(x, method='', final_cost=None, converged=True, iterations=0,
                   state_history=(), held=(), gyro_estimated=True):
    """Soft-iron A = C^-1 and hard-iron A m_b of a well-conditioned state."""
    C = x.inverse_soft_iron()
    if not is_positive_definite(C):
        raise CalibrationFailedError('estimated inverse soft-iron is not positive definite')
    condition = np.linalg.cond(C)
    if not condition <= MAX_CONDITION:
        raise CalibrationFailedError(
            'estimated inverse soft-iron is ill-conditioned (cond {:.3g})'.format(condition))
    A = np.linalg.inv(C)
    A = 0.5 * (A + A.T)
    return CalibrationResult(A, A @ x.m_b, np.array(x.w_b) if gyro_estimated else None, x,
                             method=method, final_cost=final_cost, converged=converged,
                             iterations=iterations, state_history=tuple(state_history),
                             held=tuple(held))


def observability(graph, x):
    """Smallest eigenvalue of the Jacobi-scaled information matrix at ``x``."""
    H, _, _ = graph.linearize(x)
    d = np.diag(H)
    if np.any(d <= 0.0):
        return 0.0
    s = 1.0 / np.sqrt(d)
    return float(np.linalg.eigvalsh(H * np.outer(s, s))[0])


def _check_observability(graph, x):
    value = observability(graph, x)
    if value < OBSERVABILITY_TOL:
        raise DegenerateMotionError(
            'calibration parameters are not observable from this motion '
            '(scaled information eigenvalue {:.3g})'.format(value))


def _damped_step(H, g, damping):
    # Marquardt scaling: solve (H + damping diag(H)) step = -g in Jacobi-scaled form
    d = np.diag(H)
    d = np.maximum(d, max(d.max(), 1.0) * DIAGONAL_FLOOR)
    s = 1.0 / np.sqrt(d)
    try:
        factor = linalg.cho_factor(H * np.outer(s, s) + damping * np.eye(H.shape[0]))
    except linalg.LinAlgError:
        return None
    return -s * linalg.cho_solve(factor, s * g)


def _iterate(graph, x, cost, damping, max_iters, cfg):
    """At most ``max_iters`` damped Gauss-Newton iterations from ``x``.

    Returns the final state, cost, damping, iteration count and whether a
    stopping rule fired.
    """
    converged = False
    iterations = 0
    while iterations < max_iters:
        iterations += 1
        H, g, _ = graph.linearize(x)
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(g))):
            raise NumericalFailureError('normal equations are not finite')
        start = damping
        new_cost = np.inf
        while damping <= cfg.max_damping:
            step = _damped_step(H, g, damping)
            if step is not None and np.all(np.isfinite(step)):
                candidate = CalibrationState.from_vector(x.as_vector() + step)
                new_cost = graph.cost(candidate)
                if np.isfinite(new_cost) and new_cost <= cost:
                    break
            damping *= DAMPING_UP
        else:
            if not np.isfinite(new_cost):
                raise NumericalFailureError('cost is not finite at any damping')
            # no descent left at working precision
            damping = start
            converged = True
            break

        decrease = cost - new_cost
        previous = cost
        x, cost = candidate, new_cost
        damping = max(damping / DAMPING_DOWN, cfg.min_damping)
        iflogger.debug('iteration %d: cost %.9e, damping %.1e', iterations, cost, damping)
        small_step = np.linalg.norm(step) <= cfg.rel_tol * (
            np.linalg.norm(x.as_vector()) + cfg.rel_tol)
        if (decrease <= cfg.abs_tol and decrease <= cfg.rel_tol * previous) or small_step:
            converged = True
            break
    return x, cost, damping, iterations, converged


def _least_squares(graph, x0, cfg):
    def errors(v):
        return graph.whitened_errors(CalibrationState.from_vector(v))

    def jacobian(v):
        return graph.whitened_system(CalibrationState.from_vector(v))[1]

    solution = optimize.least_squares(errors, x0.as_vector(), jac=jacobian, method='trf',
                                      x_scale='jac', ftol=cfg.rel_tol, xtol=cfg.rel_tol,
                                      max_nfev=cfg.max_iters)
    if not np.all(np.isfinite(solution.fun)):
        raise NumericalFailureError('least_squares ended on a non-finite cost')
    return (CalibrationState.from_vector(solution.x), float(solution.cost),
            int(solution.nfev), bool(solution.status > 0))


def optimize_batch(graph, x0=None, cfg=None, method='magyc-bfg'):
    """Optimises all factors of ``graph`` jointly."""
    cfg = cfg or SolverConfig()
    if not len(graph):
        raise EmptyDatasetError('factor graph is empty')
    x = x0 if x0 is not None else graph.node
    cost = graph.cost(x)
    if not np.isfinite(cost):
        raise NumericalFailureError('initial cost is not finite')

    if cfg.backend == 'scipy':
        x, cost, iterations, converged = _least_squares(graph, x, cfg)
    else:
        x, cost, _, iterations, converged = _iterate(graph, x, cost, cfg.initial_damping,
                                                     cfg.max_iters, cfg)
    if cfg.check_observability:
        _check_observability(graph, x)
    graph.node = x
    if converged:
        iflogger.info('%s converged in %d iterations, cost %.6g', method, iterations, cost)
    else:
        iflogger.warning('%s stopped after %d iterations without converging', method, iterations)
    return extract_result(x, method, cost, converged, iterations)


def average_states(states):
    """Parameter-wise mean of ``states``."""
    states = list(states)
    if not states:
        raise EmptyDatasetError('no states to average')
    return CalibrationState.from_vector(np.mean([s.as_vector() for s in states], axis=0))


def optimize_incremental(stream, noise=None, cfg=None, x0=None, method='magyc-ifg'):
    """Adds one factor pair per sample and re-optimises from the previous estimate.

    No update runs before ``cfg.warmup_samples`` factor pairs (or the whole
    stream, if shorter) are in the graph; those history entries repeat the
    initial estimate. An update whose soft-iron inverse leaves the
    positive-definite cone is held like a numerical failure. The reported
    state is the mean of the last 20% of the history.
    """
    noise = noise or NoiseModel()
    cfg = cfg or SolverConfig()
    graph = FactorGraph(x0)
    x = graph.node
    damping = cfg.initial_damping
    samples = list(stream)
    warmup = min(cfg.warmup_samples, len(samples))
    history, held = [], []
    iterations = 0
    converged = False
    for sample in samples:
        graph.add_sample(sample, noise, cfg.norm_target)
        if len(history) + 1 < warmup:
            history.append(x)
            held.append(False)
            continue
        try:
            cost = graph.cost(x)
            if not np.isfinite(cost):
                raise NumericalFailureError('cost is not finite')
            x_new, _, damping, count, converged = _iterate(graph, x, cost, damping,
                                                           cfg.update_iters, cfg)
            if not is_positive_definite(x_new.inverse_soft_iron()):
                damping = min(damping * DAMPING_UP, cfg.max_damping)
                raise NumericalFailureError('update left the positive-definite cone')
        except NumericalError as err:
            iflogger.warning('update %d held at the previous estimate: %s', len(history), err)
            held.append(True)
            converged = False
        else:
            x = x_new
            iterations += count
            held.append(False)
        history.append(x)
        graph.node = x

    if not history:
        raise EmptyDatasetError('no processed samples in the stream')
    tail = max(1, int(math.ceil(LAST_FRACTION * len(history))))
    final = average_states(history[-tail:])
    if cfg.check_observability:
        _check_observability(graph, final)
    cost = graph.cost(final)
    iflogger.info('%s processed %d updates (%d held), cost %.6g', method, len(history),
                  sum(held), cost)
    return extract_result(final, method, cost, converged, iterations,
                          state_history=history, held=held)
