# -*- coding: utf-8 -*-

"""Calibration methods shared by the pipelines and the Monte Carlo sweep."""
from dataclasses import dataclass, field

from nipype import logging

from . import sim
from .bench_ellipsoid import MIN_POINTS, ellipsoid_fit
from .calmodel import CalibrationState
from .evaluation import EvaluationReport, evaluate
from .exceptions import ConfigurationError, GyromagError, InsufficientExcitationError
from .preprocess import PreprocessConfig, check_length, preprocess
from .solver import (CalibrationResult, NoiseModel, SolverConfig, build_graph,
                     extract_result, optimize_batch, optimize_incremental)

iflogger = logging.getLogger('nipype.interface')

METHODS = ('raw', 'magyc-bfg', 'magyc-ifg', 'ellipsoid')
MAGYC = ('magyc-bfg', 'magyc-ifg')


@dataclass(frozen=True)
class CalibrationSettings(object):
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    noise: NoiseModel = field(default_factory=NoiseModel)


def check_method(method):
    if method not in METHODS:
        raise ConfigurationError('unknown method {!r}, expected one of {}'.format(
            method, ', '.join(METHODS)))
    return method


def validate_dataset(dataset, method, settings=None):
    """Fails early when ``dataset`` is too short for ``method``."""
    settings = settings or CalibrationSettings()
    check_method(method)
    if method in MAGYC:
        check_length(dataset, settings.preprocess)
    elif method == 'ellipsoid' and len(dataset) < MIN_POINTS:
        raise InsufficientExcitationError('{} samples, the ellipsoid fit needs {}'.format(
            len(dataset), MIN_POINTS))


def _raw(dataset, settings):
    return extract_result(CalibrationState.identity(), 'raw', gyro_estimated=False)


def _magyc_bfg(dataset, settings):
    graph = build_graph(preprocess(dataset, settings.preprocess), settings.noise,
                        settings.solver)
    return optimize_batch(graph, cfg=settings.solver)


def _magyc_ifg(dataset, settings):
    return optimize_incremental(preprocess(dataset, settings.preprocess), settings.noise,
                                settings.solver)


def _ellipsoid(dataset, settings):
    fit = ellipsoid_fit(dataset.m)
    return CalibrationResult(fit.soft_iron, fit.hard_iron, None, fit.to_state(),
                             method='ellipsoid', final_cost=fit.algebraic_residual,
                             iterations=1)


_REGISTRY = {
    'raw': _raw,
    'magyc-bfg': _magyc_bfg,
    'magyc-ifg': _magyc_ifg,
    'ellipsoid': _ellipsoid,
}


def calibrate(dataset, method, settings=None):
    """Calibrates ``dataset`` with ``method``; every method returns a CalibrationResult."""
    settings = settings or CalibrationSettings()
    validate_dataset(dataset, method, settings)
    iflogger.info('calibrating %s (%d samples) with %s', dataset.label or 'dataset',
                  len(dataset), method)
    return _REGISTRY[method](dataset, settings)


def run_cells(run, seed=0, kinds=sim.KINDS, methods=('magyc-bfg', 'ellipsoid'),
              settings=None, truth=None, duration=sim.DURATION, rate=sim.RATE):
    """Reports of one Monte Carlo run: every kind x method on the shared evaluation set.

    Failures become failed reports instead of aborting the run.
    """
    settings = settings or CalibrationSettings()
    for method in methods:
        check_method(method)
    mc_run = sim.simulate_run(run, seed, kinds, truth, duration, rate)
    reports = []
    for kind, dataset in mc_run.calibration.items():
        for method in methods:
            try:
                result = calibrate(dataset, method, settings)
                report = evaluate(mc_run.evaluation, result.state, method,
                                  gyro_estimated=result.gyro_bias is not None,
                                  calibration=kind)
            except GyromagError as err:
                iflogger.warning('run %d, %s on %s failed: %s', run, method, kind, err)
                report = EvaluationReport.failed(method, mc_run.evaluation.label,
                                                 err.as_dict(), calibration=kind)
            reports.append(report)
    return reports
