from nipype.interfaces import utility as util
from nipype.pipeline import engine as pe

from ..exceptions import ConfigurationError
from . import parse_opt, set_inputs
from .interfaces import Evaluate


def create_pipeline(name="evaluate", opt="", truth=True):
    """Evaluation of a calibration; ``truth`` connects the truth sidecar."""

    parameters = parse_opt(opt, {'declination': ''})
    if parameters['declination'] == '':
        parameters['declination'] = None
    else:
        try:
            parameters['declination'] = float(parameters['declination'])
        except ValueError:
            raise ConfigurationError('declination: invalid value {!r}'.format(
                parameters['declination']))

    input_fields = ["calibration", "evaluation"] + (["truth"] if truth else [])
    inputnode = pe.Node(
        interface=util.IdentityInterface(fields=input_fields),
        name="inputnode")

    evaluate = pe.Node(interface=Evaluate(), name="evaluate")
    set_inputs(evaluate, parameters)

    outputnode = pe.Node(
        interface=util.IdentityInterface(fields=["report", "headings"]),
        name="outputnode")

    workflow = pe.Workflow(name=name)
    workflow.base_output_dir = name

    workflow.connect([(inputnode, evaluate, [(field, field) for field in input_fields]),
                      (evaluate, outputnode, [("report", "report"),
                                              ("headings", "headings")])])

    return workflow
