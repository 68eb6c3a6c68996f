# -*- coding: utf-8 -*-
import os.path as op

from nipype.interfaces.base import File, TraitedSpec, traits

from ... import dataio
from ...methods import METHODS, calibrate
from .base import CalibrationSettingsInputSpec, GyromagBase, settings_from_inputs


class CalibrateInputSpec(CalibrationSettingsInputSpec):
    in_file = File(
        exists=True,
        mandatory=True,
        desc='dataset CSV with columns t,mx,my,mz,wx,wy,wz')
    method = traits.Enum(
        *METHODS,
        mandatory=True,
        desc='calibration method')


class CalibrateOutputSpec(TraitedSpec):
    out_file = File(exists=True, desc='calibration JSON document')


class Calibrate(GyromagBase):
    """Estimates soft-iron, hard-iron and gyroscope bias from a dataset CSV."""

    input_spec = CalibrateInputSpec
    output_spec = CalibrateOutputSpec

    def _out_file(self):
        return op.abspath('calibration_{}.json'.format(self.inputs.method))

    def _compute(self):
        settings = settings_from_inputs(self.inputs)
        dataset = dataio.read_dataset(self.inputs.in_file)
        result = calibrate(dataset, self.inputs.method, settings)
        doc = dataio.calibration_document(result, dataset.label, settings)
        self._results['out_file'] = dataio.write_document(self._out_file(), doc)

    def _failure(self, err):
        label = op.splitext(op.basename(self.inputs.in_file))[0]
        doc = dataio.failure_document('calibration', self.inputs.method, err, dataset=label)
        self._results['out_file'] = dataio.write_document(self._out_file(), doc)
