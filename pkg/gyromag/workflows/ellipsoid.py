from nipype.interfaces import utility as util
from nipype.pipeline import engine as pe

from .interfaces import Calibrate


def create_pipeline(name="ellipsoid", opt=""):
    """Ellipsoid Fit baseline on the raw magnetometer cloud (no options)."""

    inputnode = pe.Node(
        interface=util.IdentityInterface(fields=["in_file"]),
        name="inputnode")

    calibrate = pe.Node(interface=Calibrate(), name="calibrate")
    calibrate.inputs.method = 'ellipsoid'

    outputnode = pe.Node(
        interface=util.IdentityInterface(fields=["calibration"]),
        name="outputnode")

    workflow = pe.Workflow(name=name)
    workflow.base_output_dir = name

    workflow.connect([(inputnode, calibrate, [("in_file", "in_file")]),
                      (calibrate, outputnode, [("out_file", "calibration")])])

    return workflow
