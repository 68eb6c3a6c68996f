# -*- coding: utf-8 -*-

"""Pipeline builders; each module exposes ``create_pipeline(name, opt)``."""
from nipype import logging
from nipype.interfaces.base import traits

from ..exceptions import ConfigurationError

wflogger = logging.getLogger('nipype.workflow')

CALIBRATION_PARAMETERS = {'window': None,
                          'derivative_scheme': 'central',
                          'sigma_residual': 0.001,
                          'sigma_norm': 0.01,
                          'rel_tol': 1e-7,
                          'abs_tol': 1e-7,
                          'max_iters': 200,
                          'initial_damping': 1e-4,
                          'norm_target': 1.0,
                          'update_iters': 5,
                          'warmup_samples': 10,
                          'backend': 'lm',
                          'check_observability': True}

SIMULATION_PARAMETERS = {'sigma_mag': 1.0,
                         'sigma_gyro': 0.005,
                         'duration': 400.0,
                         'rate': 25.0}

TRUE_VALUES = ('1', 'true', 'yes', 'on')
FALSE_VALUES = ('0', 'false', 'no', 'off')


def _coerce(key, default, value):
    try:
        if isinstance(default, bool):
            if value.lower() in TRUE_VALUES:
                return True
            if value.lower() in FALSE_VALUES:
                return False
            raise ValueError(value)
        if default is None or isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except ValueError:
        raise ConfigurationError('{}: invalid value {!r}'.format(key, value))
    return value


def parse_opt(opt, parameters):
    """Overrides ``parameters`` with the ``key:value,key:value`` pairs of ``opt``."""
    parameters = dict(parameters)
    if not opt:
        return parameters
    for o in opt.split(','):
        try:
            [key, value] = o.split(':')
        except ValueError:
            wflogger.warning('%s: irregular format, skipping', o)
            continue
        key = key.strip()
        if key not in parameters:
            wflogger.warning('%s: unknown option, skipping', key)
            continue
        parameters[key] = _coerce(key, parameters[key], value.strip())
    return parameters


def set_inputs(node, parameters):
    for key, value in parameters.items():
        if value is None:
            continue
        try:
            setattr(node.inputs, key, value)
        except traits.TraitError as err:
            raise ConfigurationError('{}: {}'.format(key, err))
