# -*- coding: utf-8 -*-
import os
import os.path as op

from nipype.interfaces.base import (BaseInterface, BaseInterfaceInputSpec, File,
                                    TraitedSpec, traits)

from ... import dataio, sim
from ...evaluation import EvaluationReport
from ...methods import METHODS, run_cells
from .base import CalibrationSettingsInputSpec, GyromagBase, settings_from_inputs


class SimulateInputSpec(BaseInterfaceInputSpec):
    kind = traits.Enum(*sim.KINDS, usedefault=True, desc='motion profile of the calibration set')
    run = traits.Int(0, usedefault=True, desc='Monte Carlo run index')
    seed = traits.Int(0, usedefault=True, desc='master seed')
    sigma_mag = traits.Float(sim.SIGMA_MAG, usedefault=True, desc='magnetometer noise (mG)')
    sigma_gyro = traits.Float(sim.SIGMA_GYRO, usedefault=True, desc='gyroscope noise (rad/s)')
    duration = traits.Float(sim.DURATION, usedefault=True, desc='dataset length (s)')
    rate = traits.Float(sim.RATE, usedefault=True, desc='sample rate (Hz)')


class SimulateOutputSpec(TraitedSpec):
    calibration = File(exists=True, desc='calibration dataset CSV')
    evaluation = File(exists=True, desc='evaluation dataset CSV')
    truth = File(exists=True, desc='truth sidecar JSON')


class Simulate(BaseInterface):
    """Writes one calibration dataset and the shared evaluation dataset of a run."""

    input_spec = SimulateInputSpec
    output_spec = SimulateOutputSpec

    def _run_interface(self, runtime):
        truth = sim.benchmark_truth(self.inputs.sigma_mag, self.inputs.sigma_gyro)
        mc_run = sim.simulate_run(self.inputs.run, self.inputs.seed, [self.inputs.kind],
                                  truth, self.inputs.duration, self.inputs.rate)
        self._paths = dataio.write_run(os.getcwd(), mc_run)
        return runtime

    def _list_outputs(self):
        outputs = self.output_spec().get()
        outputs['calibration'] = op.abspath('calibration_{}.csv'.format(self.inputs.kind.lower()))
        outputs['evaluation'] = op.abspath('evaluation.csv')
        outputs['truth'] = op.abspath('truth.json')
        return outputs


class MonteCarloRunInputSpec(CalibrationSettingsInputSpec):
    run = traits.Int(0, usedefault=True, desc='Monte Carlo run index')
    seed = traits.Int(0, usedefault=True, desc='master seed')
    kinds = traits.List(traits.Enum(*sim.KINDS), value=list(sim.KINDS), usedefault=True,
                        desc='calibration motion profiles')
    methods = traits.List(traits.Enum(*METHODS), value=['magyc-bfg', 'ellipsoid'],
                          usedefault=True, desc='calibration methods')
    sigma_mag = traits.Float(sim.SIGMA_MAG, usedefault=True, desc='magnetometer noise (mG)')
    sigma_gyro = traits.Float(sim.SIGMA_GYRO, usedefault=True, desc='gyroscope noise (rad/s)')
    duration = traits.Float(sim.DURATION, usedefault=True, desc='dataset length (s)')
    rate = traits.Float(sim.RATE, usedefault=True, desc='sample rate (Hz)')


class MonteCarloRunOutputSpec(TraitedSpec):
    report_file = File(exists=True, desc='reports JSON of every kind x method cell')


class MonteCarloRun(GyromagBase):
    """Simulates, calibrates and evaluates every cell of one Monte Carlo run."""

    input_spec = MonteCarloRunInputSpec
    output_spec = MonteCarloRunOutputSpec

    def _out_file(self):
        return op.abspath('reports_run{}.json'.format(self.inputs.run))

    def _write(self, reports):
        doc = dataio.reports_document(reports, self.inputs.run, self.inputs.seed)
        self._results['report_file'] = dataio.write_document(self._out_file(), doc)

    def _compute(self):
        truth = sim.benchmark_truth(self.inputs.sigma_mag, self.inputs.sigma_gyro)
        self._write(run_cells(self.inputs.run, self.inputs.seed, self.inputs.kinds,
                              self.inputs.methods, settings_from_inputs(self.inputs), truth,
                              self.inputs.duration, self.inputs.rate))

    def _failure(self, err):
        self._write([EvaluationReport.failed(method, sim.EVALUATION, err.as_dict(),
                                             calibration=kind)
                     for kind in self.inputs.kinds for method in self.inputs.methods])
