# -*- coding: utf-8 -*-
from nipype import logging
from nipype.interfaces.base import (BaseInterface, BaseInterfaceInputSpec,
                                    isdefined, traits)

from ...exceptions import GyromagError
from ...methods import CalibrationSettings
from ...preprocess import PreprocessConfig
from ...solver import NoiseModel, SolverConfig

iflogger = logging.getLogger('nipype.interface')


class CalibrationSettingsInputSpec(BaseInterfaceInputSpec):
    window = traits.Int(
        desc='averaging window in samples (default: nominal sample rate in Hz)')
    derivative_scheme = traits.Enum(
        'central', 'forward', usedefault=True,
        desc='numeric differentiation of the averaged field')
    sigma_residual = traits.Float(
        0.001, usedefault=True,
        desc='isotropic covariance of the residual factors, (mG/s)^2')
    sigma_norm = traits.Float(
        0.01, usedefault=True, desc='covariance of the soft-iron norm factors')
    rel_tol = traits.Float(1e-7, usedefault=True, desc='relative cost tolerance')
    abs_tol = traits.Float(1e-7, usedefault=True, desc='absolute cost tolerance')
    max_iters = traits.Int(200, usedefault=True, desc='batch iteration cap')
    initial_damping = traits.Float(1e-4, usedefault=True, desc='initial LM damping')
    norm_target = traits.Float(
        1.0, usedefault=True, desc='target norm of the inverse soft-iron terms')
    update_iters = traits.Int(
        5, usedefault=True, desc='iteration cap per incremental update')
    warmup_samples = traits.Int(
        10, usedefault=True, desc='factor pairs added before the first incremental update')
    backend = traits.Enum(
        'lm', 'scipy', usedefault=True,
        desc='batch solver: built-in Levenberg-Marquardt or scipy least_squares')
    check_observability = traits.Bool(
        True, usedefault=True, desc='reject motion that leaves parameters unobservable')


def settings_from_inputs(inputs):
    window = inputs.window if isdefined(inputs.window) else None
    return CalibrationSettings(
        preprocess=PreprocessConfig(window, inputs.derivative_scheme),
        solver=SolverConfig(rel_tol=inputs.rel_tol, abs_tol=inputs.abs_tol,
                            max_iters=inputs.max_iters,
                            initial_damping=inputs.initial_damping,
                            norm_target=inputs.norm_target,
                            update_iters=inputs.update_iters,
                            warmup_samples=inputs.warmup_samples, backend=inputs.backend,
                            check_observability=inputs.check_observability),
        noise=NoiseModel(inputs.sigma_residual, inputs.sigma_norm))


class GyromagBase(BaseInterface):
    """Interface whose library errors end in a status document, not a crash."""

    def _run_interface(self, runtime):
        self._results = {}
        try:
            self._compute()
        except GyromagError as err:
            iflogger.warning('%s: %s [%s]', self.__class__.__name__, err, err.kind)
            self._failure(err)
        return runtime

    def _compute(self):
        raise NotImplementedError

    def _failure(self, err):
        raise NotImplementedError

    def _list_outputs(self):
        outputs = self.output_spec().get()
        outputs.update(getattr(self, '_results', {}))
        return outputs
