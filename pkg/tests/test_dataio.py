import json

import numpy as np
import pytest

from gyromag import dataio, sim
from gyromag.evaluation import EvaluationReport, summarize
from gyromag.exceptions import (DatasetParseError, DegenerateMotionError,
                                EmptyDatasetError, InvalidDocumentError,
                                SchemaVersionError)
from gyromag.methods import CalibrationSettings
from gyromag.solver import extract_result


@pytest.fixture
def dataset(noisy_truth):
    return sim.synthesize(sim.profile_for('MAM', seed=2, duration=4.0), noisy_truth, seed=8)


def _write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_dataset_round_trip_is_exact(tmp_path, dataset):
    path = dataio.write_dataset(str(tmp_path / 'mam.csv'), dataset)
    with open(path, encoding='utf-8') as f:
        assert f.readline() == 't,mx,my,mz,wx,wy,wz,roll,pitch,heading\n'
    loaded = dataio.read_dataset(path)
    assert loaded.label == 'mam'
    for name in ('t', 'm', 'w', 'attitude'):
        np.testing.assert_array_equal(getattr(loaded, name), getattr(dataset, name))


def test_dataset_without_attitude(tmp_path, dataset):
    bare = sim.Dataset(dataset.t, dataset.m, dataset.w)
    loaded = dataio.read_dataset(dataio.write_dataset(str(tmp_path / 'bare.csv'), bare))
    assert not loaded.has_attitude
    np.testing.assert_array_equal(loaded.w, dataset.w)


def test_columns_in_any_order(tmp_path):
    path = _write(tmp_path / 'order.csv',
                  'wx,wy,wz,t,mx,my,mz\n0.1,0.2,0.3,0.0,1,2,3\n0.1,0.2,0.3,0.04,4,5,6\n')
    loaded = dataio.read_dataset(path)
    np.testing.assert_array_equal(loaded.t, [0.0, 0.04])
    np.testing.assert_array_equal(loaded.m[1], [4.0, 5.0, 6.0])


def test_missing_column(tmp_path):
    path = _write(tmp_path / 'missing.csv', 't,mx,my,mz,wx,wy\n0,1,2,3,4,5\n')
    with pytest.raises(DatasetParseError, match="missing column 'wz'") as err:
        dataio.read_dataset(path)
    assert err.value.line == 1


def test_partial_attitude_columns(tmp_path):
    path = _write(tmp_path / 'partial.csv', 't,mx,my,mz,wx,wy,wz,roll\n0,1,2,3,4,5,6,0\n')
    with pytest.raises(DatasetParseError, match="missing column 'pitch'"):
        dataio.read_dataset(path)


def test_bad_value_reports_line(tmp_path):
    path = _write(tmp_path / 'bad.csv',
                  't,mx,my,mz,wx,wy,wz\n0,1,2,3,4,5,6\n1,1,abc,3,4,5,6\n')
    with pytest.raises(DatasetParseError, match='line 3') as err:
        dataio.read_dataset(path)
    assert err.value.column == 'my'
    assert err.value.exit_code == 2


def test_non_increasing_time(tmp_path):
    path = _write(tmp_path / 'time.csv',
                  't,mx,my,mz,wx,wy,wz\n0,1,2,3,4,5,6\n1,1,2,3,4,5,6\n1,1,2,3,4,5,6\n')
    with pytest.raises(DatasetParseError) as err:
        dataio.read_dataset(path)
    assert err.value.line == 4


def test_empty_inputs(tmp_path):
    with pytest.raises(DatasetParseError):
        dataio.read_dataset(_write(tmp_path / 'empty.csv', ''))
    with pytest.raises(EmptyDatasetError):
        dataio.read_dataset(_write(tmp_path / 'header.csv', 't,mx,my,mz,wx,wy,wz\n'))


def test_truth_document_round_trip(tmp_path, noisy_truth):
    path = dataio.write_document(str(tmp_path / 'truth.json'),
                                 dataio.truth_document(noisy_truth))
    truth = dataio.truth_from_document(dataio.read_document(path, 'truth'))
    np.testing.assert_array_equal(truth.soft_iron(), noisy_truth.soft_iron())
    np.testing.assert_array_equal(truth.m_b, noisy_truth.m_b)
    assert truth.sigma_gyro == noisy_truth.sigma_gyro


def test_document_schema_version(noisy_truth):
    doc = dataio.truth_document(noisy_truth)
    doc['schema_version'] = '2.0'
    with pytest.raises(SchemaVersionError):
        dataio.validate_document(doc)
    doc['schema_version'] = '1.3'
    assert dataio.validate_document(doc) is doc


def test_document_type_mismatch(tmp_path, noisy_truth):
    path = dataio.write_document(str(tmp_path / 'truth.json'),
                                 dataio.truth_document(noisy_truth))
    with pytest.raises(InvalidDocumentError):
        dataio.read_document(path, 'calibration')


def test_document_schema_violation(noisy_truth):
    doc = dataio.truth_document(noisy_truth)
    doc['m0'] = [1.0, 2.0]
    with pytest.raises(InvalidDocumentError):
        dataio.validate_document(doc)


def test_invalid_json(tmp_path):
    with pytest.raises(InvalidDocumentError):
        dataio.read_document(_write(tmp_path / 'broken.json', '{"type": '))


def test_calibration_document(tmp_path, truth):
    x = truth.state()
    result = extract_result(x, 'magyc-ifg', final_cost=1.5, iterations=3,
                            state_history=[x, x], held=[False, True])
    doc = dataio.calibration_document(result, 'wam', CalibrationSettings())
    path = dataio.write_document(str(tmp_path / 'calibration.json'), doc)
    loaded = dataio.read_document(path, 'calibration')
    assert loaded['status'] == 'ok'
    assert loaded['held'] == [False, True]
    assert loaded['settings']['window'] is None
    assert loaded['settings']['update_iters'] == 5
    np.testing.assert_array_equal(dataio.state_from_document(loaded).as_vector(),
                                  x.as_vector())


def test_calibration_document_without_gyro(truth):
    result = extract_result(truth.state(), 'ellipsoid', gyro_estimated=False)
    doc = dataio.validate_document(dataio.calibration_document(result))
    assert doc['gyro_bias'] is None


def test_failure_document(tmp_path):
    doc = dataio.failure_document('calibration', 'magyc-bfg', DegenerateMotionError('static'),
                                  dataset='lam')
    path = dataio.write_document(str(tmp_path / 'failed.json'), doc)
    loaded = dataio.read_document(path)
    assert loaded['error'] == {'kind': 'degenerate-motion', 'message': 'static', 'exit_code': 3}
    assert dataio.state_from_document(loaded) is None


def test_report_documents(tmp_path):
    report = EvaluationReport('magyc-bfg', 'evaluation', 1.2, 0.8, 0.9, [1.0, 2.0, 3.0],
                              [[0.1, 0.0, 0.0], [0.0, 0.1, 0.0], [0.0, 0.0, 0.1]], 1.01,
                              [0.0, 0.0, 0.001], calibration='WAM')
    failed = EvaluationReport.failed('ellipsoid', 'evaluation',
                                     {'kind': 'non-ellipsoid', 'message': 'flat',
                                      'exit_code': 3}, calibration='LAM')
    path = dataio.write_document(str(tmp_path / 'report.json'), dataio.report_document(report))
    loaded = dataio.report_from_document(dataio.read_document(path))
    assert loaded.as_dict() == report.as_dict()
    doc = dataio.reports_document([report, failed], run=2, seed=7)
    path = dataio.write_document(str(tmp_path / 'reports.json'), doc)
    loaded = dataio.reports_from_document(dataio.read_document(path))
    assert [r.as_dict() for r in loaded] == [report.as_dict(), failed.as_dict()]


def test_summary_outputs(tmp_path):
    reports = [EvaluationReport('magyc-bfg', 'evaluation', 1.0, 0.5, 2.0, calibration='WAM'),
               EvaluationReport.failed('ellipsoid', 'evaluation',
                                       {'kind': 'non-ellipsoid', 'message': 'flat',
                                        'exit_code': 3}, calibration='LAM')]
    cells = summarize(reports)
    doc = dataio.summary_document(cells, runs=1, seed=0, kinds=['WAM', 'LAM'],
                                  methods=['magyc-bfg', 'ellipsoid'])
    dataio.write_document(str(tmp_path / 'summary.json'), doc)
    path = dataio.write_summary_table(str(tmp_path / 'summary.csv'), cells)
    with open(path, encoding='utf-8') as f:
        lines = f.read().splitlines()
    assert lines[0] == ','.join(dataio.SUMMARY_COLUMNS)
    assert lines[1].startswith('LAM,ellipsoid,1,1,N/A')
    assert lines[2].startswith('WAM,magyc-bfg,1,0,1,0.5,2,N/A')


def test_headings_header_only(tmp_path):
    path = dataio.write_headings(str(tmp_path / 'headings.csv'))
    with open(path, encoding='utf-8') as f:
        assert f.read() == ','.join(dataio.HEADING_COLUMNS) + '\n'


def test_write_run(tmp_path):
    mc_run = sim.simulate_run(0, seed=0, kinds=['LAM'], duration=4.0)
    paths = dataio.write_run(str(tmp_path), mc_run)
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        'calibration_lam.csv', 'evaluation.csv', 'truth.json']
    assert sorted(paths) == ['LAM', 'evaluation', 'truth']
    with open(paths['truth'], encoding='utf-8') as f:
        doc = json.load(f)
    assert sorted(doc['datasets']) == ['calibration_lam.csv', 'evaluation.csv']
    loaded = dataio.read_dataset(paths['LAM'])
    np.testing.assert_array_equal(loaded.m, mc_run.calibration['LAM'].m)
