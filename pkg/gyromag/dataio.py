# -*- coding: utf-8 -*-

"""CSV datasets and versioned JSON documents.

Dataset CSV header: ``t,mx,my,mz,wx,wy,wz[,roll,pitch,heading]`` in seconds,
milligauss, rad/s and radians; UTF-8 with LF line endings.

JSON documents carry ``schema_version`` and ``type`` and are validated
against ``gyromag/schemas/<type>.schema.json``.
"""
import csv
import json
import os
from dataclasses import asdict
from functools import lru_cache

import jsonschema
import numpy as np
from nipype import logging

from .calmodel import CalibrationState
from .evaluation import EvaluationReport
from .exceptions import (DatasetParseError, EmptyDatasetError,
                         InvalidDocumentError, SchemaVersionError)
from .sim import Dataset, SimulationTruth

iflogger = logging.getLogger('nipype.interface')

SCHEMA_VERSION = '1.0'
DOCUMENT_TYPES = ('truth', 'calibration', 'report', 'reports', 'summary')
DATASET_COLUMNS = ('t', 'mx', 'my', 'mz', 'wx', 'wy', 'wz')
ATTITUDE_COLUMNS = ('roll', 'pitch', 'heading')
HEADING_COLUMNS = ('t', 'heading_true_deg', 'heading_est_deg', 'heading_error_deg')
SUMMARY_COLUMNS = ('kind', 'method', 'runs', 'failures', 'heading_rmse', 'heading_std',
                   'mag_field_std', 'hard_iron_error', 'soft_iron_error', 'gyro_bias_error')
SCHEMA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'schemas')


def _fmt(value):
    return '{:.17g}'.format(value)


def write_dataset(path, dataset):
    columns = DATASET_COLUMNS + (ATTITUDE_COLUMNS if dataset.has_attitude else ())
    blocks = [dataset.t[:, None], dataset.m, dataset.w]
    if dataset.has_attitude:
        blocks.append(dataset.attitude)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in np.hstack(blocks):
            writer.writerow([_fmt(v) for v in row])
    return os.path.abspath(path)


def read_dataset(path, label=None, truth=None):
    """Parses a dataset CSV, reporting the line and column of any bad value."""
    label = label if label is not None else os.path.splitext(os.path.basename(path))[0]
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise DatasetParseError('empty file, expected header {}'.format(
                ','.join(DATASET_COLUMNS)), line=1)
        header = [name.strip() for name in header]
        for name in DATASET_COLUMNS:
            if name not in header:
                raise DatasetParseError("missing column '{}'".format(name), line=1, column=name)
        present = [name for name in ATTITUDE_COLUMNS if name in header]
        if present and len(present) != len(ATTITUDE_COLUMNS):
            missing = [name for name in ATTITUDE_COLUMNS if name not in header][0]
            raise DatasetParseError("missing column '{}'".format(missing), line=1,
                                    column=missing)
        columns = DATASET_COLUMNS + (ATTITUDE_COLUMNS if present else ())
        index = [header.index(name) for name in columns]

        rows, lines = [], []
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            values = []
            for name, i in zip(columns, index):
                try:
                    value = float(row[i])
                except IndexError:
                    raise DatasetParseError("missing value in column '{}'".format(name),
                                            line=reader.line_num, column=name)
                except ValueError:
                    raise DatasetParseError("bad value {!r} in column '{}'".format(row[i], name),
                                            line=reader.line_num, column=name)
                if not np.isfinite(value):
                    raise DatasetParseError("non-finite value in column '{}'".format(name),
                                            line=reader.line_num, column=name)
                values.append(value)
            rows.append(values)
            lines.append(reader.line_num)

    if not rows:
        raise EmptyDatasetError('{} holds no samples'.format(path))
    data = np.array(rows)
    bad = np.flatnonzero(np.diff(data[:, 0]) <= 0.0)
    if bad.size:
        raise DatasetParseError('time is not strictly increasing', line=lines[bad[0] + 1],
                                column='t')
    return Dataset(data[:, 0], data[:, 1:4], data[:, 4:7],
                   attitude=data[:, 7:10] if present else None, truth=truth, label=label,
                   metadata={'source': os.path.abspath(path)})


@lru_cache(maxsize=None)
def _schema(doc_type):
    with open(os.path.join(SCHEMA_DIR, '{}.schema.json'.format(doc_type)),
              encoding='utf-8') as f:
        return json.load(f)


def _check_header(doc, doc_type=None):
    if not isinstance(doc, dict):
        raise InvalidDocumentError('expected a JSON object')
    version = doc.get('schema_version')
    if not isinstance(version, str) or version.split('.')[0] != SCHEMA_VERSION.split('.')[0]:
        raise SchemaVersionError('unsupported schema_version {!r}, expected {}'.format(
            version, SCHEMA_VERSION))
    if doc.get('type') not in DOCUMENT_TYPES:
        raise InvalidDocumentError('unknown document type {!r}'.format(doc.get('type')))
    if doc_type is not None and doc['type'] != doc_type:
        raise InvalidDocumentError('expected a {} document, got {}'.format(doc_type, doc['type']))


def validate_document(doc, doc_type=None):
    _check_header(doc, doc_type)
    try:
        jsonschema.validate(doc, _schema(doc['type']))
    except jsonschema.ValidationError as err:
        raise InvalidDocumentError('{} document: {}'.format(doc['type'], err.message))
    return doc


def write_document(path, doc):
    validate_document(doc)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(doc, f, indent=2, sort_keys=True, allow_nan=False)
        f.write('\n')
    return os.path.abspath(path)


def read_document(path, doc_type=None):
    try:
        with open(path, encoding='utf-8') as f:
            doc = json.load(f)
    except ValueError as err:
        raise InvalidDocumentError('{} is not valid JSON: {}'.format(path, err))
    return validate_document(doc, doc_type)


def _document(doc_type, **fields):
    doc = {'schema_version': SCHEMA_VERSION, 'type': doc_type}
    doc.update(fields)
    return doc


def _list(value):
    return None if value is None else np.asarray(value, dtype=float).tolist()


def truth_document(truth, datasets=None):
    return _document('truth', m0=_list(truth.m0),
                     soft_iron_terms=_list(truth.soft_iron_terms.c),
                     pseudo_hard_iron=_list(truth.m_b), hard_iron=_list(truth.hard_iron()),
                     gyro_bias=_list(truth.w_b), sigma_mag=truth.sigma_mag,
                     sigma_gyro=truth.sigma_gyro, datasets=datasets or {})


def truth_from_document(doc):
    validate_document(doc, 'truth')
    return SimulationTruth(doc['m0'], doc['soft_iron_terms'], doc['pseudo_hard_iron'],
                           doc['gyro_bias'], doc['sigma_mag'], doc['sigma_gyro'])


def _state_fields(x):
    return {'c': _list(x.c.c), 'm_b': _list(x.m_b), 'w_b': _list(x.w_b)}


def settings_fields(settings):
    fields = {'window': settings.preprocess.window,
              'derivative_scheme': settings.preprocess.derivative_scheme,
              'sigma_residual': _list(settings.noise.sigma_residual),
              'sigma_norm': settings.noise.sigma_norm}
    fields.update(asdict(settings.solver))
    return fields


def calibration_document(result, dataset='', settings=None):
    return _document('calibration', method=result.method, dataset=dataset,
                     status=result.status, soft_iron=_list(result.soft_iron),
                     hard_iron=_list(result.hard_iron), gyro_bias=_list(result.gyro_bias),
                     state=_state_fields(result.state), final_cost=result.final_cost,
                     converged=result.converged, iterations=result.iterations,
                     state_history=[_list(x.as_vector()) for x in result.state_history],
                     held=list(result.held),
                     settings=settings_fields(settings) if settings is not None else {})


def failure_document(doc_type, method, error, **fields):
    """Document of a failed step; ``error`` is a GyromagError or its dict."""
    if not isinstance(error, dict):
        error = error.as_dict()
    return _document(doc_type, method=method, status='error', error=dict(error), **fields)


def state_from_document(doc):
    """Calibration state of a calibration document, or None for failed runs."""
    validate_document(doc, 'calibration')
    if doc['status'] == 'error':
        return None
    state = doc['state']
    return CalibrationState(state['c'], state['m_b'], state['w_b'])


def report_document(report):
    return _document('report', **report.as_dict())


def report_from_document(doc):
    validate_document(doc, 'report')
    fields = {k: v for k, v in doc.items() if k not in ('schema_version', 'type')}
    return EvaluationReport(**fields)


def reports_document(reports, run, seed):
    return _document('reports', run=int(run), seed=int(seed),
                     reports=[report.as_dict() for report in reports])


def reports_from_document(doc):
    validate_document(doc, 'reports')
    return [EvaluationReport(**fields) for fields in doc['reports']]


def summary_document(cells, runs, seed, kinds, methods):
    return _document('summary', runs=int(runs), seed=int(seed), kinds=list(kinds),
                     methods=list(methods), cells=[asdict(cell) for cell in cells])


def _cell(value):
    if value is None:
        return 'N/A'
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def write_summary_table(path, cells):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(SUMMARY_COLUMNS)
        for cell in cells:
            writer.writerow([_cell(getattr(cell, name)) for name in SUMMARY_COLUMNS])
    return os.path.abspath(path)


def write_headings(path, dataset=None, stats=None):
    """Per-sample heading plot data; header only when there is nothing to plot."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(HEADING_COLUMNS)
        if dataset is not None and stats is not None:
            rows = np.column_stack([dataset.t, np.degrees(dataset.attitude[:, 2]),
                                    np.degrees(stats.estimated), np.degrees(stats.errors)])
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    return os.path.abspath(path)


def write_run(directory, mc_run):
    """Calibration CSVs, the evaluation CSV and the truth sidecar of a simulated run."""
    paths = {}
    datasets = {}
    for kind, dataset in mc_run.calibration.items():
        name = 'calibration_{}.csv'.format(kind.lower())
        paths[kind] = write_dataset(os.path.join(directory, name), dataset)
        datasets[name] = dataset.metadata
    paths['evaluation'] = write_dataset(os.path.join(directory, 'evaluation.csv'),
                                        mc_run.evaluation)
    datasets['evaluation.csv'] = mc_run.evaluation.metadata
    paths['truth'] = write_document(os.path.join(directory, 'truth.json'),
                                    truth_document(mc_run.evaluation.truth, datasets))
    iflogger.info('wrote simulated run %d to %s', mc_run.run, directory)
    return paths
