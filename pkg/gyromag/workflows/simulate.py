from nipype.interfaces import utility as util
from nipype.pipeline import engine as pe

from . import SIMULATION_PARAMETERS, parse_opt, set_inputs
from .interfaces import Simulate


def create_pipeline(name="simulate", opt="", kind="WAM", seed=0):

    parameters = parse_opt(opt, SIMULATION_PARAMETERS)

    inputnode = pe.Node(
        interface=util.IdentityInterface(fields=["run"]),
        name="inputnode")

    simulate = pe.Node(interface=Simulate(), name="simulate")
    simulate.inputs.kind = kind
    simulate.inputs.seed = seed
    set_inputs(simulate, parameters)

    output_fields = ["calibration", "evaluation", "truth"]
    outputnode = pe.Node(
        interface=util.IdentityInterface(fields=output_fields),
        name="outputnode")

    workflow = pe.Workflow(name=name)
    workflow.base_output_dir = name

    workflow.connect([(inputnode, simulate, [("run", "run")]),
                      (simulate, outputnode, [("calibration", "calibration"),
                                              ("evaluation", "evaluation"),
                                              ("truth", "truth")])])

    return workflow
