from nipype.interfaces import utility as util
from nipype.pipeline import engine as pe

from . import CALIBRATION_PARAMETERS, SIMULATION_PARAMETERS, parse_opt, set_inputs
from .interfaces import MonteCarloRun, Summarize


def create_pipeline(name="montecarlo", opt="", runs=1, seed=0,
                    kinds=("WAM", "MAM", "LAM"), methods=("magyc-bfg", "ellipsoid")):
    """Simulate-calibrate-evaluate sweep over ``runs`` runs, summarised per cell."""

    defaults = dict(CALIBRATION_PARAMETERS)
    defaults.update(SIMULATION_PARAMETERS)
    parameters = parse_opt(opt, defaults)

    runnode = pe.Node(
        interface=util.IdentityInterface(fields=["run"]),
        name="runnode")
    runnode.iterables = ("run", list(range(runs)))

    mcrun = pe.Node(interface=MonteCarloRun(), name="mcrun")
    mcrun.inputs.seed = seed
    mcrun.inputs.kinds = list(kinds)
    mcrun.inputs.methods = list(methods)
    set_inputs(mcrun, parameters)

    summary = pe.JoinNode(interface=Summarize(), name="summary",
                          joinsource="runnode", joinfield=["report_files"])
    summary.inputs.seed = seed
    summary.inputs.kinds = list(kinds)
    summary.inputs.methods = list(methods)

    outputnode = pe.Node(
        interface=util.IdentityInterface(fields=["summary", "table"]),
        name="outputnode")

    workflow = pe.Workflow(name=name)
    workflow.base_output_dir = name

    workflow.connect([(runnode, mcrun, [("run", "run")]),
                      (mcrun, summary, [("report_file", "report_files")]),
                      (summary, outputnode, [("summary", "summary"),
                                             ("table", "table")])])

    return workflow
