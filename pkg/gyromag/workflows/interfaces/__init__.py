from __future__ import absolute_import

from .calibration import Calibrate
from .simulation import Simulate, MonteCarloRun
from .evaluation import Evaluate, Summarize
