from nipype.interfaces import utility as util
from nipype.pipeline import engine as pe

from . import CALIBRATION_PARAMETERS, parse_opt, set_inputs
from .interfaces import Calibrate


def create_pipeline(name="magyc_bfg", opt=""):
    """Batch calibration: every factor pair optimised jointly."""

    parameters = parse_opt(opt, CALIBRATION_PARAMETERS)
    parameters.pop('update_iters')
    parameters.pop('warmup_samples')

    inputnode = pe.Node(
        interface=util.IdentityInterface(fields=["in_file"]),
        name="inputnode")

    calibrate = pe.Node(interface=Calibrate(), name="calibrate")
    calibrate.inputs.method = 'magyc-bfg'
    set_inputs(calibrate, parameters)

    outputnode = pe.Node(
        interface=util.IdentityInterface(fields=["calibration"]),
        name="outputnode")

    workflow = pe.Workflow(name=name)
    workflow.base_output_dir = name

    workflow.connect([(inputnode, calibrate, [("in_file", "in_file")]),
                      (calibrate, outputnode, [("out_file", "calibration")])])

    return workflow
