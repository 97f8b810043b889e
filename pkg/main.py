#!/usr/bin/env python3
"""
Discrete Lagrangian Descriptor Tool

Computes discrete Lagrangian descriptor (MD_p) fields for two-dimensional
autonomous and nonautonomous maps, scans transects for the singular
features that mark stable and unstable manifolds, and checks the direct
orbit summation against closed forms.

License: MIT
"""

import os
import sys
import traceback
from typing import Any, Dict

import click
import numpy as np
from rich.console import Console
from tabulate import tabulate

from src.config.map_catalog import MapCatalog
from src.config.messages import MessageTemplates
from src.descriptor import accumulate
from src.errors import DLDError, NonFiniteIterate, ParameterError
from src.field.grid_engine import evaluate_field
from src.field.summary_generator import SummaryGenerator
from src.map_kernels import MapKernelFactory
from src.oracles import closed_form_for, sample_points
from src.output_formatter import OutputFormatterFactory, write_transect_csv
from src.singularity import scan_transect
from src.utils.cli_params import (
    RunConfig,
    descriptor_options,
    grid_options,
    kernel_options,
    merge_options,
    output_options,
    runtime_options,
    transect_options,
)
from src.utils.logger import set_verbosity, setup_logger

# Setup logging
logger = setup_logger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2


def fail(message: str, code: int) -> None:
    click.echo(message, err=True)
    sys.exit(code)


def load_run_config(ctx: click.Context, kwargs: Dict[str, Any]) -> RunConfig:
    """Merge flags with --config and validate; configuration errors exit 2."""
    set_verbosity(bool(kwargs.get('verbose')))
    if kwargs.get('seed') is not None:
        fail(MessageTemplates.get_seed_rejected(), EXIT_USAGE)
    try:
        options = merge_options(ctx, kwargs)
        if not options.get('map_name') or options['map_name'].lower() not in MapKernelFactory.available_kernels():
            fail(MessageTemplates.get_unknown_map(options.get('map_name'),
                                                  MapKernelFactory.available_kernels()), EXIT_USAGE)
        return RunConfig(**options)
    except ParameterError as e:
        fail(f"❌ Invalid configuration: {e}", EXIT_USAGE)


def ensure_parent_dir(path: str) -> None:
    output_dir = os.path.dirname(path)
    if output_dir and not os.path.exists(output_dir):
        os.makedirs(output_dir, exist_ok=True)


def progress_console():
    return Console(stderr=True) if sys.stderr.isatty() else None


def handle_runtime_error(e: Exception, verbose: bool) -> None:
    """Parameter errors exit 2, everything else raised during a run exits 1."""
    if isinstance(e, ParameterError):
        fail(f"❌ Invalid parameters: {e}", EXIT_USAGE)
    logger.error(f"Run failed: {e}")
    if verbose:
        traceback.print_exc()
    message = f"❌ {e}"
    if isinstance(e, NonFiniteIterate):
        message += "\n" + MessageTemplates.get_escape_hint()
    fail(message, EXIT_FAILURE)


@click.group()
def cli():
    """
    Discrete Lagrangian descriptors for 2D maps.

    Low MD_p values mark orbits that stay near invariant sets; cusps of
    the field mark stable and unstable manifolds.
    """


@cli.command()
@kernel_options
@descriptor_options
@grid_options
@output_options
@runtime_options
@click.pass_context
def field(ctx, **kwargs):
    """Evaluate MD_p on a rectangular grid and write csv / dldgrid / pgm files."""
    config = load_run_config(ctx, kwargs)
    try:
        outputs = config.field_outputs()
        kernel = config.kernel()
        params = config.descriptor_params()
        grid = config.grid_spec()

        result = evaluate_field(kernel, grid, params, workers=config.workers,
                                tracker_console=progress_console())

        metadata = config.as_metadata(kernel, 'grid')
        for path in outputs:
            ensure_parent_dir(path)
            OutputFormatterFactory.write_field(result, path, metadata)

        click.echo(SummaryGenerator().generate_field_summary(result, outputs))
    except (DLDError, OSError) as e:
        handle_runtime_error(e, config.verbose)


@cli.command()
@kernel_options
@descriptor_options
@transect_options
@output_options
@runtime_options
@click.pass_context
def transect(ctx, **kwargs):
    """Sample MD_p along a line and report singular crossings."""
    config = load_run_config(ctx, kwargs)
    try:
        output = config.transect_output()
        kernel = config.kernel()
        params = config.descriptor_params()
        spec = config.transect_spec()

        report = scan_transect(kernel, spec, params, threshold_factor=config.threshold_factor,
                               workers=config.workers)

        if output:
            ensure_parent_dir(output)
            write_transect_csv(report, output, config.as_metadata(kernel, 'transect'))

        click.echo(SummaryGenerator().generate_transect_summary(report, output))
    except (DLDError, OSError) as e:
        handle_runtime_error(e, config.verbose)


@cli.command('oracle-check')
@kernel_options
@descriptor_options
@runtime_options
@click.option('--points', type=int, default=200, show_default=True,
              help='Number of sampled initial conditions')
@click.option('--half-width', type=float, default=1.0, show_default=True,
              help='Points are drawn from [-w, w]^2')
@click.option('--tolerance', type=float, default=1e-10, show_default=True,
              help='Maximum accepted relative error')
@click.option('--oracle-lambda', type=float, hidden=True,
              help='Evaluate the closed form at a different lambda (failure-path check)')
@click.pass_context
def oracle_check(ctx, points, half_width, tolerance, oracle_lambda, **kwargs):
    """Compare direct orbit summation with the closed form of an analytic kernel."""
    config = load_run_config(ctx, kwargs)
    spec = MapKernelFactory.get_spec(config.map_name)
    if not spec.analytic:
        analytic = [n for n in MapKernelFactory.available_kernels() if MapKernelFactory.get_spec(n).analytic]
        fail(MessageTemplates.get_no_closed_form(config.map_name, analytic), EXIT_USAGE)

    try:
        kernel = config.kernel()
        params = config.descriptor_params()
        oracle_kernel = kernel
        if oracle_lambda is not None:
            oracle_kernel = MapKernelFactory.create_kernel(
                config.map_name, {**config.kernel_params, 'lambda': oracle_lambda})
        oracle = closed_form_for(oracle_kernel, params.p, params.N, params.n0)

        sample = sample_points(oracle, points, half_width)
        xs = np.array([x for x, _ in sample])
        ys = np.array([y for _, y in sample])
        direct = accumulate(kernel, xs, ys, params).md_total
        expected = np.array([oracle(x, y) for x, y in sample])

        scale = np.where(expected != 0.0, np.abs(expected), 1.0)
        max_error = float(np.max(np.abs(direct - expected) / scale))
    except (DLDError, OSError) as e:
        handle_runtime_error(e, config.verbose)

    click.echo(SummaryGenerator().generate_oracle_summary(kernel.describe(), max_error, tolerance, points))
    if not max_error < tolerance:
        fail(MessageTemplates.get_oracle_failure(max_error, tolerance), EXIT_FAILURE)


@cli.command()
def kernels():
    """List the available map kernels and their default parameters."""
    rows = []
    for name in MapKernelFactory.available_kernels():
        spec = MapKernelFactory.get_spec(name)
        defaults = MapCatalog(name).get_parameters()
        params = ', '.join(f"{k}={defaults[k]}" if k in defaults else k for k in spec.parameters)
        rows.append([name, params, 'yes' if spec.analytic else 'no', spec.description])
    click.echo(tabulate(rows, headers=['Kernel', 'Parameters', 'Closed form', 'Description'],
                        tablefmt='simple'))


if __name__ == '__main__':
    cli()
