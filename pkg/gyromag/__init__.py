# -*- coding: utf-8 -*-

"""Top-level package for Gyroscope-aided Magnetometer Calibration Command Line Tool (GYROMAG)."""

__author__ = """The gyromag developers"""
__version__ = '0.2.0'
