# -*- coding: utf-8 -*-

"""Console script for gyromag."""
import glob
import json
import os.path
import sys
from importlib import import_module

import click
import nipype.pipeline.engine as pe
from nipype.interfaces import utility as util
from nipype.interfaces.io import DataSink

from . import dataio, sim
from .exceptions import NOT_CONVERGED, GyromagError
from .methods import check_method, validate_dataset
from .workflows.interfaces.base import settings_from_inputs

CALIBRATION_WORKFLOWS = ('magyc_bfg', 'magyc_ifg', 'ellipsoid', 'raw')


def _fail(ctx, err):
    click.echo('error[{}]: {}'.format(err.kind, err), err=True)
    ctx.exit(err.exit_code)


def _import_workflow(ctx, workflow, available):
    if workflow not in available:
        click.echo(workflow + ' is not a valid workflow.', err=True)
        ctx.exit(2)
    return import_module('.workflows.' + workflow, package='gyromag')


@click.group(chain=True)
@click.option('-w', '--working_dir', type=click.Path(exists=True, file_okay=False,
                                                      resolve_path=True),
              help='Working directory.')
@click.option('-n', '--name', type=str, help='Experiment name.')
@click.option('-r', '--results', type=str, help='Results directory.')
@click.option('-j', '--nprocs', type=click.IntRange(min=1), default=1, show_default=True,
              envvar='GYROMAG_NPROCS', help='Worker processes (MultiProc when above 1).')
@click.option('--graph/--no-graph', default=False,
              help='Write the workflow graph (needs GraphViz).')
@click.pass_context
def cli(ctx, working_dir, name, results, nprocs, graph):
    if not ctx.obj:
        ctx.obj = {}
    if not working_dir:
        ctx.obj['wdir'] = os.path.abspath('.')
    else:
        ctx.obj['wdir'] = click.format_filename(working_dir)
    if not results:
        ctx.obj['output'] = 'gyromag'
    else:
        ctx.obj['output'] = results
    datasink = pe.Node(DataSink(base_directory=ctx.obj['wdir'],
                                container=ctx.obj['output']),
                       name="datasink")
    if not name:
        name = 'gyromag_run'
    wf = pe.Workflow(name=name, base_dir=ctx.obj['wdir'])
    wf.add_nodes([datasink])
    ctx.obj['workflow'] = wf
    ctx.obj['results'] = datasink
    ctx.obj['sinks'] = set()
    ctx.obj['calibrations'] = []


@cli.command('simulate')
@click.option('-k', '--kind', type=click.Choice(sim.KINDS, case_sensitive=False),
              default='WAM', show_default=True, help='Motion profile of the calibration set.')
@click.option('--runs', type=click.IntRange(min=1), default=1, show_default=True,
              help='Number of simulated runs.')
@click.option('--seed', type=click.IntRange(min=0), default=0, show_default=True,
              help='Master seed.')
@click.option('--opt', type=str, help='Workflow-specific optional arguments.')
@click.pass_context
def simulate(ctx, kind, runs, seed, opt):
    """Simulates a calibration dataset, the evaluation dataset and the truth.

    Options: sigma_mag, sigma_gyro, duration, rate"""

    wf_mod = _import_workflow(ctx, 'simulate', ('simulate',))
    try:
        wf_sub = wf_mod.create_pipeline(name='simulate', opt=opt, kind=kind.upper(),
                                        seed=seed)
        node = wf_sub.get_node('simulate')
        sim.benchmark_truth(node.inputs.sigma_mag, node.inputs.sigma_gyro)
        sim.profile_for(kind, duration=node.inputs.duration, rate=node.inputs.rate)
    except GyromagError as err:
        _fail(ctx, err)
    param = pe.Node(
        interface=util.IdentityInterface(fields=["run"]),
        name="run_node")
    param.iterables = ("run", list(range(runs)))
    wf = ctx.obj['workflow']
    wf.add_nodes([wf_sub])
    wf.connect([(param, wf_sub, [("run", "inputnode.run")]),
                (wf_sub, ctx.obj['results'], [
                    ("outputnode.calibration", "simulation.@calibration"),
                    ("outputnode.evaluation", "simulation.@evaluation"),
                    ("outputnode.truth", "simulation.@truth")])])
    ctx.obj['simulate'] = wf_sub
    return 'simulate ' + kind.upper()


@cli.command('calibrate')
@click.argument('workflow', required=True)
@click.option('-i', '--in_file', type=click.Path(exists=True, dir_okay=False,
                                                 resolve_path=True),
              help='Dataset CSV (t,mx,my,mz,wx,wy,wz[,roll,pitch,heading]).')
@click.option('--opt', type=str, help='Workflow-specific optional arguments.')
@click.pass_context
def calibrate(ctx, workflow, in_file, opt):
    """Estimates soft-iron, hard-iron and gyroscope bias.

    Available workflows: magyc_bfg, magyc_ifg, ellipsoid, raw"""

    wf_mod = _import_workflow(ctx, workflow, CALIBRATION_WORKFLOWS)
    wf = ctx.obj['workflow']
    try:
        wf_sub = wf_mod.create_pipeline(name=workflow, opt=opt)
        node = wf_sub.get_node('calibrate')
        settings = settings_from_inputs(node.inputs)
        if in_file:
            dataset = dataio.read_dataset(click.format_filename(in_file))
            validate_dataset(dataset, node.inputs.method, settings)
    except GyromagError as err:
        _fail(ctx, err)
    if in_file:
        wf_sub.inputs.inputnode.in_file = click.format_filename(in_file)
        wf.add_nodes([wf_sub])
    elif 'simulate' in ctx.obj:
        wf.add_nodes([wf_sub])
        wf.connect([(ctx.obj['simulate'], wf_sub, [("outputnode.calibration",
                                                    "inputnode.in_file")])])
    else:
        raise click.UsageError('calibrate needs --in_file or a preceding simulate step.')
    wf.connect([(wf_sub, ctx.obj['results'], [
        ("outputnode.calibration", "calibration.@" + workflow)])])
    ctx.obj['sinks'].add('calibration')
    ctx.obj['calibrations'].append(wf_sub)
    return 'calibrate ' + workflow


@cli.command('evaluate')
@click.option('-c', '--calibration', type=click.Path(exists=True, dir_okay=False,
                                                     resolve_path=True),
              help='Calibration JSON document.')
@click.option('-e', '--evaluation', type=click.Path(exists=True, dir_okay=False,
                                                    resolve_path=True),
              help='Evaluation dataset CSV with roll, pitch and heading.')
@click.option('-t', '--truth', type=click.Path(exists=True, dir_okay=False,
                                               resolve_path=True),
              help='Truth sidecar JSON (enables parameter errors).')
@click.option('--declination', type=float,
              help='Declination in degrees (default: from the truth sidecar).')
@click.option('--opt', type=str, help='Workflow-specific optional arguments.')
@click.pass_context
def evaluate(ctx, calibration, evaluation, truth, declination, opt):
    """Computes heading RMSE, field std and parameter errors.

    Options: declination"""

    wf_mod = _import_workflow(ctx, 'evaluate', ('evaluate',))
    wf = ctx.obj['workflow']
    chained = 'simulate' in ctx.obj
    if not calibration and not ctx.obj['calibrations']:
        raise click.UsageError('evaluate needs --calibration or a preceding calibrate step.')
    if not evaluation and not chained:
        raise click.UsageError('evaluate needs --evaluation or a preceding simulate step.')
    try:
        if calibration:
            dataio.read_document(click.format_filename(calibration), 'calibration')
        if evaluation:
            dataio.read_dataset(click.format_filename(evaluation))
        if truth:
            dataio.read_document(click.format_filename(truth), 'truth')
    except GyromagError as err:
        _fail(ctx, err)

    sources = [None] if calibration else ctx.obj['calibrations']
    with_truth = bool(truth) or (chained and not evaluation)
    for source in sources:
        tag = 'file' if source is None else source.name
        try:
            wf_sub = wf_mod.create_pipeline(name='evaluate_' + tag, opt=opt, truth=with_truth)
        except GyromagError as err:
            _fail(ctx, err)
        if declination is not None:
            wf_sub.inputs.evaluate.declination = declination
        wf.add_nodes([wf_sub])
        if source is None:
            wf_sub.inputs.inputnode.calibration = click.format_filename(calibration)
        else:
            wf.connect([(source, wf_sub, [("outputnode.calibration",
                                           "inputnode.calibration")])])
        if evaluation:
            wf_sub.inputs.inputnode.evaluation = click.format_filename(evaluation)
            if truth:
                wf_sub.inputs.inputnode.truth = click.format_filename(truth)
        else:
            wf.connect([(ctx.obj['simulate'], wf_sub, [
                ("outputnode.evaluation", "inputnode.evaluation"),
                ("outputnode.truth", "inputnode.truth")])])
        wf.connect([(wf_sub, ctx.obj['results'], [
            ("outputnode.report", "evaluation.@report_" + tag),
            ("outputnode.headings", "evaluation.@headings_" + tag)])])
    ctx.obj['sinks'].add('evaluation')
    return 'evaluate'


@cli.command('montecarlo')
@click.option('--kinds', type=str, default='WAM,MAM,LAM', show_default=True,
              help='Comma-separated motion profiles.')
@click.option('--methods', type=str, default='magyc-bfg,ellipsoid', show_default=True,
              help='Comma-separated methods (raw, magyc-bfg, magyc-ifg, ellipsoid).')
@click.option('--runs', type=click.IntRange(min=1), default=1, show_default=True,
              help='Number of Monte Carlo runs.')
@click.option('--seed', type=click.IntRange(min=0), default=0, show_default=True,
              help='Master seed.')
@click.option('--opt', type=str, help='Workflow-specific optional arguments.')
@click.pass_context
def montecarlo(ctx, kinds, methods, runs, seed, opt):
    """Calibrates every kind with every method and summarises the metrics.

    Options: sigma_mag, sigma_gyro, duration, rate and the calibration options"""

    wf_mod = _import_workflow(ctx, 'montecarlo', ('montecarlo',))
    kinds = [k.strip().upper() for k in kinds.split(',') if k.strip()]
    methods = [m.strip() for m in methods.split(',') if m.strip()]
    try:
        for kind in kinds:
            sim.profile_for(kind)
        for method in methods:
            check_method(method)
        wf_sub = wf_mod.create_pipeline(name='montecarlo', opt=opt, runs=runs, seed=seed,
                                        kinds=kinds, methods=methods)
    except GyromagError as err:
        _fail(ctx, err)
    wf = ctx.obj['workflow']
    wf.add_nodes([wf_sub])
    wf.connect([(wf_sub, ctx.obj['results'], [
        ("outputnode.summary", "montecarlo.@summary"),
        ("outputnode.table", "montecarlo.@table")])])
    ctx.obj['sinks'].add('montecarlo')
    return 'montecarlo'


def collect_status(out_dir, folders):
    """Largest exit code among the status documents under ``folders``."""
    code = 0
    for folder in sorted(folders):
        pattern = os.path.join(out_dir, folder, '**', '*.json')
        for path in sorted(glob.glob(pattern, recursive=True)):
            with open(path, encoding='utf-8') as f:
                doc = json.load(f)
            status = doc.get('status')
            if status == 'error':
                error = doc['error']
                click.echo('error[{}]: {} ({})'.format(error['kind'], error['message'],
                                                       os.path.basename(path)), err=True)
                code = max(code, error['exit_code'])
            elif status == 'not-converged':
                click.echo('warning[{}]: {}'.format(NOT_CONVERGED['kind'],
                                                    os.path.basename(path)), err=True)
                code = max(code, NOT_CONVERGED['exit_code'])
    return code


@cli.result_callback()
def process_result(steps, working_dir, name, results, nprocs, graph):
    for n, s in enumerate(steps):
        click.echo('Step {}: {}'.format(n + 1, s))
    ctx = click.get_current_context()
    wf = ctx.obj['workflow']
    if graph:
        wf.write_graph(graph2use='colored')
        click.echo('Workflow graph generated.')
    click.echo('Workflow about to be executed.')
    try:
        if nprocs > 1:
            wf.run(plugin='MultiProc', plugin_args={'n_procs': nprocs})
        else:
            wf.run()
    except RuntimeError as err:
        click.echo('error[node-crash]: {}'.format(err), err=True)
        ctx.exit(1)
    out_dir = os.path.join(ctx.obj['wdir'], ctx.obj['output'])
    code = collect_status(out_dir, ctx.obj['sinks'])
    table = os.path.join(out_dir, 'montecarlo', 'summary.csv')
    if 'montecarlo' in ctx.obj['sinks'] and os.path.exists(table):
        with open(table, encoding='utf-8') as f:
            click.echo(f.read().rstrip('\n'))
    ctx.exit(code)


if __name__ == "__main__":
    sys.exit(cli(obj={}))
