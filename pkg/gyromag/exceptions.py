# -*- coding: utf-8 -*-

"""Error taxonomy shared by the library, the interfaces and the CLI.

Every error carries a machine-readable ``kind`` and the process exit code the
command line tool uses when the error ends a run:

* 2 -- input errors (unreadable files, bad configuration, missing truth);
* 3 -- degenerate data (not enough excitation to calibrate);
* 4 -- numerical failures.
"""


class GyromagError(RuntimeError):
    kind = 'error'
    exit_code = 1

    def as_dict(self):
        return {'kind': self.kind,
                'message': str(self),
                'exit_code': self.exit_code}


class InputError(GyromagError):
    kind = 'input-error'
    exit_code = 2


class EmptyDatasetError(InputError):
    kind = 'empty-dataset'


class InsufficientDataError(InputError):
    kind = 'insufficient-data'


class DatasetParseError(InputError):
    kind = 'parse-error'

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = 'line {}: {}'.format(line, message)
        super(DatasetParseError, self).__init__(message)
        self.line = line
        self.column = column


class SchemaVersionError(InputError):
    kind = 'schema-version'


class InvalidDocumentError(InputError):
    kind = 'invalid-document'


class MissingGroundTruthError(InputError):
    kind = 'missing-ground-truth'


class ConfigurationError(InputError):
    kind = 'invalid-configuration'


class TimeRangeError(InputError):
    kind = 'time-out-of-range'


class DegenerateDataError(GyromagError):
    kind = 'degenerate-data'
    exit_code = 3


class DegenerateTimingError(DegenerateDataError):
    kind = 'degenerate-timing'


class DegenerateMotionError(DegenerateDataError):
    kind = 'degenerate-motion'


class NonEllipsoidError(DegenerateDataError):
    kind = 'non-ellipsoid'


class InsufficientExcitationError(DegenerateDataError):
    kind = 'insufficient-excitation'


class NumericalError(GyromagError):
    kind = 'numerical-error'
    exit_code = 4


class NumericalFailureError(NumericalError):
    kind = 'numerical-failure'


class SingularPointError(NumericalError):
    kind = 'singular-point'


class GimbalLockError(NumericalError):
    kind = 'gimbal-lock'


class CalibrationFailedError(NumericalError):
    kind = 'calibration-failure'


# status reported for runs that hit the iteration cap
NOT_CONVERGED = {'kind': 'not-converged', 'exit_code': NumericalError.exit_code}
