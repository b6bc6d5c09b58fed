"""Command-line interface of the workbench.

Usage: cloaksim <ite|cloak|validate|sweep|mesh> [--config FILE]
[--preset NAME] [overrides]

"""
import argparse
import logging
import sys
import typing

from cloaksim.application import initialize_application
from cloaksim.business.cloaking import CloakingInteractor
from cloaksim.business.eigenvalues import EigenvalueInteractor
from cloaksim.business.sweeps import SweepInteractor
from cloaksim.business.validation import ValidationInteractor
from cloaksim.configuration import PRESETS
from cloaksim.configuration import ConfigError
from cloaksim.configuration import Document
from cloaksim.configuration import RunConfig
from cloaksim.configuration import SweepAxis
from cloaksim.configuration import SweepPipeline
from cloaksim.configuration import dump_config
from cloaksim.configuration import parse_override
from cloaksim.entities import CavityCondition
from cloaksim.entities import ScatterMode
from cloaksim.exceptions import CloakSimError
from cloaksim.geometry import export_mesh
from cloaksim.geometry import generate_mesh
from cloaksim.reports import write_mesh_summary

_logger = logging.getLogger(__name__)

EXIT_SUCCESS: typing.Final[int] = 0
EXIT_FAILURE: typing.Final[int] = 1
EXIT_USAGE: typing.Final[int] = 2

EFFECTIVE_CONFIG_FILE_NAME: typing.Final[str] = 'effective-config.yml'


def _create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', dest='config_file',
                        help='path to the configuration file')
    common.add_argument('--preset', choices=sorted(PRESETS),
                        help='preset merged over the configuration file')
    common.add_argument('--h', type=float, help='mesh size')
    common.add_argument('--degree', type=int, choices=[1, 2],
                        help='polynomial degree')
    common.add_argument('--bc', choices=[c.value for c in CavityCondition],
                        help='boundary condition on the cavity boundary')
    common.add_argument('--kappa', type=float, help='wavenumber')
    common.add_argument('--mode', action='append',
                        choices=[mode.value for mode in ScatterMode],
                        help='scattering mode (repeatable)')
    common.add_argument('--output', help='output directory')
    common.add_argument('--set', action='append', default=[],
                        dest='settings', metavar='SECTION.KEY=VALUE',
                        help='arbitrary configuration override')
    parser = argparse.ArgumentParser(
        prog='cloaksim',
        description='Interior transmission eigenvalues and acoustic '
        'cloaking by Herglotz incident waves.')
    commands = parser.add_subparsers(dest='command', required=True)
    ite = commands.add_parser('ite', parents=[common],
                              help='compute interior transmission '
                              'eigenvalues')
    ite.add_argument('--oracle', action='store_true',
                     help='also write the radially symmetric eigenvalues '
                     '(disc geometries)')
    commands.add_parser('cloak', parents=[common],
                        help='fit Herglotz incident waves and verify '
                        'the cloak')
    validate = commands.add_parser('validate', parents=[common],
                                   help='run the validation suites')
    validate.add_argument('--quick', action='store_true',
                          help='run only the sub-second checks')
    validate.add_argument('--mass-perturbation', type=float, default=0.0,
                          help=argparse.SUPPRESS)
    sweep = commands.add_parser('sweep', parents=[common],
                                help='run one pipeline per parameter value')
    sweep.add_argument('--axis', choices=[axis.value for axis in SweepAxis],
                       help='swept parameter')
    sweep.add_argument('--values', type=float, nargs='+',
                       help='parameter values')
    sweep.add_argument('--pipeline',
                       choices=[pipeline.value for pipeline in SweepPipeline],
                       help='pipeline run per value')
    sweep.add_argument('--workers', type=int, help='number of workers')
    mesh = commands.add_parser('mesh', parents=[common],
                               help='generate and export a mesh')
    mesh.add_argument('--include-exterior', action='store_true',
                      help='also mesh the physical box and the PML')
    mesh.add_argument('--no-cavity', action='store_true',
                      help='leave a hole in the cavity')
    return parser


def _collect_overrides(arguments: argparse.Namespace) \
        -> typing.List[Document]:
    overrides: typing.List[Document] = []
    shortcuts = [
        ('mesh', 'h', arguments.h),
        ('mesh', 'degree', arguments.degree),
        ('ite', 'cavity_bc', arguments.bc),
        ('scatter', 'kappa', arguments.kappa),
        ('scatter', 'modes', arguments.mode),
        ('output', 'directory', arguments.output),
        ('sweep', 'axis', getattr(arguments, 'axis', None)),
        ('sweep', 'values', getattr(arguments, 'values', None)),
        ('sweep', 'pipeline', getattr(arguments, 'pipeline', None)),
        ('sweep', 'number_workers', getattr(arguments, 'workers', None))
    ]
    for section, key, value in shortcuts:
        if value is not None:
            overrides.append({section: {key: value}})
    # Explicit overrides are applied last
    for setting in arguments.settings:
        overrides.append(parse_override(setting))
    return overrides


def _run_ite(run_config: RunConfig, arguments: argparse.Namespace) -> int:
    report = EigenvalueInteractor().run(run_config,
                                        with_roots=arguments.oracle)
    for index, pair in enumerate(report.solution.pairs):
        print(f'{index} {pair.kappa.real:.6f} {pair.kappa.imag:+.6f}i '
              f'residual={pair.residual:.2e}')
    return EXIT_SUCCESS


def _run_cloak(run_config: RunConfig, arguments: argparse.Namespace) -> int:
    report = CloakingInteractor().run(run_config)
    for row in report.rows:
        print(f'{row.mode} kappa={row.kappa:.6f} ratio={row.ratio:.6f} '
              f'fit_residual={row.fit_residual:.2e}')
    return EXIT_SUCCESS


def _run_validate(run_config: RunConfig,
                  arguments: argparse.Namespace) -> int:
    interactor = ValidationInteractor(arguments.mass_perturbation)
    report = interactor.run(arguments.quick, run_config.output_directory)
    for check in report.checks:
        status = 'PASS' if check.passed else 'FAIL'
        print(f'{status} {check.name} value={check.value:.3e} '
              f'threshold={check.threshold:.1e}')
    return EXIT_SUCCESS if report.passed else EXIT_FAILURE


def _run_sweep(run_config: RunConfig, arguments: argparse.Namespace) -> int:
    report = SweepInteractor().run(run_config)
    failures = [row for row in report.rows if row.error is not None]
    for row in report.rows:
        print(f'{row.value:g} ' + ('failed: ' + row.error if row.error
                                   is not None else 'ok'))
    return EXIT_SUCCESS if len(failures) == 0 else EXIT_FAILURE


def _run_mesh(run_config: RunConfig, arguments: argparse.Namespace) -> int:
    mesh = generate_mesh(run_config.geometry, run_config.mesh.h,
                         include_exterior=arguments.include_exterior,
                         keep_cavity=not arguments.no_cavity)
    directory = run_config.output_directory
    directory.mkdir(parents=True, exist_ok=True)
    export_mesh(mesh, directory / 'mesh.txt')
    write_mesh_summary(mesh, directory / 'mesh_summary.csv')
    print(f'nodes={mesh.node_count} triangles={mesh.triangle_count}')
    return EXIT_SUCCESS


_COMMANDS: typing.Final[typing.Dict[str, typing.Callable[
    [RunConfig, argparse.Namespace], int]]] = {
        'ite': _run_ite,
        'cloak': _run_cloak,
        'validate': _run_validate,
        'sweep': _run_sweep,
        'mesh': _run_mesh
    }


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """Run the workbench command line.

    Returns
    -------
    int
        The exit code (0 on success, 1 on failures, 2 on usage errors).

    """
    parser = _create_parser()
    try:
        arguments = parser.parse_args(argv)
    except SystemExit as error:
        return EXIT_SUCCESS if error.code == 0 else EXIT_USAGE
    try:
        overrides = _collect_overrides(arguments)
    except ConfigError as error:
        parser.print_usage(sys.stderr)
        print(f'cloaksim: error: {error}', file=sys.stderr)
        return EXIT_USAGE
    try:
        run_config = initialize_application(arguments.config_file,
                                            arguments.preset, overrides)
    except SystemExit:
        return EXIT_FAILURE
    try:
        directory = run_config.output_directory
        directory.mkdir(parents=True, exist_ok=True)
        (directory / EFFECTIVE_CONFIG_FILE_NAME).write_text(
            dump_config(run_config))
        return _COMMANDS[arguments.command](run_config, arguments)
    except (CloakSimError, OSError):
        _logger.error('command failed', extra={'command': arguments.command},
                      exc_info=True)
        return EXIT_FAILURE
