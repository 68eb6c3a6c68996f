# -*- coding: utf-8 -*-
import math
import os.path as op

from nipype.interfaces.base import (BaseInterface, BaseInterfaceInputSpec, File,
                                    InputMultiPath, TraitedSpec, isdefined, traits)

from ... import dataio
from ...evaluation import EvaluationReport, evaluate, heading_statistics, summarize
from .base import GyromagBase


class EvaluateInputSpec(BaseInterfaceInputSpec):
    calibration = File(exists=True, mandatory=True, desc='calibration JSON document')
    evaluation = File(
        exists=True, mandatory=True,
        desc='evaluation dataset CSV with roll, pitch and heading columns')
    truth = File(exists=True, desc='truth sidecar JSON (enables parameter errors)')
    declination = traits.Float(
        desc='declination of the horizontal field (deg), from the truth when omitted')


class EvaluateOutputSpec(TraitedSpec):
    report = File(exists=True, desc='evaluation report JSON')
    headings = File(exists=True, desc='per-sample heading plot data CSV')


class Evaluate(GyromagBase):
    """Heading and field metrics of a calibration on an evaluation dataset."""

    input_spec = EvaluateInputSpec
    output_spec = EvaluateOutputSpec

    def _tag(self):
        name = op.splitext(op.basename(self.inputs.calibration))[0]
        return name[len('calibration_'):] if name.startswith('calibration_') else name

    def _write(self, report, dataset=None, stats=None):
        tag = self._tag()
        self._results['report'] = dataio.write_document(
            op.abspath('report_{}.json'.format(tag)), dataio.report_document(report))
        self._results['headings'] = dataio.write_headings(
            op.abspath('headings_{}.csv'.format(tag)), dataset, stats)

    def _compute(self):
        doc = dataio.read_document(self.inputs.calibration, 'calibration')
        self._method = doc['method']
        label = op.splitext(op.basename(self.inputs.evaluation))[0]
        if doc['status'] == 'error':
            self._write(EvaluationReport.failed(doc['method'], label, doc['error'],
                                                calibration=doc.get('dataset', '')))
            return
        truth = None
        if isdefined(self.inputs.truth):
            truth = dataio.truth_from_document(dataio.read_document(self.inputs.truth, 'truth'))
        dataset = dataio.read_dataset(self.inputs.evaluation, truth=truth)
        declination = None
        if isdefined(self.inputs.declination):
            declination = math.radians(self.inputs.declination)
        x = dataio.state_from_document(doc)
        stats = heading_statistics(dataset, x, declination)
        report = evaluate(dataset, x, doc['method'], truth=truth, declination=declination,
                          gyro_estimated=doc['gyro_bias'] is not None,
                          calibration=doc.get('dataset', ''), stats=stats)
        self._write(report, dataset, stats)

    def _failure(self, err):
        method = getattr(self, '_method', self._tag())
        label = op.splitext(op.basename(self.inputs.evaluation))[0]
        self._write(EvaluationReport.failed(method, label, err.as_dict()))


class SummarizeInputSpec(BaseInterfaceInputSpec):
    report_files = InputMultiPath(
        File(exists=True), mandatory=True, desc='reports JSON of every Monte Carlo run')
    seed = traits.Int(0, usedefault=True, desc='master seed of the sweep')
    kinds = traits.List(traits.Str, desc='calibration motion profiles')
    methods = traits.List(traits.Str, desc='calibration methods')


class SummarizeOutputSpec(TraitedSpec):
    summary = File(exists=True, desc='summary JSON document')
    table = File(exists=True, desc='summary table CSV')


class Summarize(BaseInterface):
    """Averages Monte Carlo reports per (kind, method) cell."""

    input_spec = SummarizeInputSpec
    output_spec = SummarizeOutputSpec

    def _run_interface(self, runtime):
        reports = []
        for report_file in self.inputs.report_files:
            reports.extend(dataio.reports_from_document(
                dataio.read_document(report_file, 'reports')))
        cells = summarize(reports)
        kinds = self.inputs.kinds if isdefined(self.inputs.kinds) else sorted(
            {cell.kind for cell in cells})
        methods = self.inputs.methods if isdefined(self.inputs.methods) else sorted(
            {cell.method for cell in cells})
        dataio.write_document(
            op.abspath('summary.json'),
            dataio.summary_document(cells, len(self.inputs.report_files), self.inputs.seed,
                                    kinds, methods))
        dataio.write_summary_table(op.abspath('summary.csv'), cells)
        return runtime

    def _list_outputs(self):
        outputs = self.output_spec().get()
        outputs['summary'] = op.abspath('summary.json')
        outputs['table'] = op.abspath('summary.csv')
        return outputs
