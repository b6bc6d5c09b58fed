import types
import unittest.mock

import numpy as np
import pytest

from cloaksim.cli import EFFECTIVE_CONFIG_FILE_NAME
from cloaksim.cli import EXIT_FAILURE
from cloaksim.cli import EXIT_SUCCESS
from cloaksim.cli import EXIT_USAGE
from cloaksim.cli import main
from cloaksim.configuration import parse_run_config
from cloaksim.exceptions import CloakSimError
from cloaksim.ite import EigenPair
from cloaksim.reports import RatioRow
from cloaksim.reports import SweepRow


@pytest.fixture
def run_config(tmp_path):
    return parse_run_config({
        'mesh': {
            'h': 0.2
        },
        'output': {
            'directory': str(tmp_path / 'output')
        }
    })


@pytest.fixture
def mock_initialize_application(run_config):
    with unittest.mock.patch('cloaksim.cli.initialize_application',
                             return_value=run_config) as mock:
        yield mock


@pytest.mark.parametrize('argv', [[], ['unknown'], ['ite', '--degree', '3'],
                                  ['cloak', '--mode', 'cloaked'],
                                  ['ite', '--h', 'fine']])
def test_main_usage_error(argv):
    assert main(argv) == EXIT_USAGE


def test_main_help():
    assert main(['--help']) == EXIT_SUCCESS


def test_main_malformed_override(mock_initialize_application):
    assert main(['ite', '--set', 'mesh.h']) == EXIT_USAGE
    mock_initialize_application.assert_not_called()


@unittest.mock.patch('cloaksim.cli.EigenvalueInteractor')
def test_main_overrides(mock_interactor, mock_initialize_application):
    exit_code = main([
        'ite', '--config', 'config.yml', '--preset', 'table1', '--h', '0.05',
        '--bc', 'neumann', '--mode', 'lossy1', '--mode', 'lossy2', '--set',
        'mesh.h=0.02'
    ])

    assert exit_code == EXIT_SUCCESS
    mock_initialize_application.assert_called_once_with(
        'config.yml', 'table1', [{
            'mesh': {
                'h': 0.05
            }
        }, {
            'ite': {
                'cavity_bc': 'neumann'
            }
        }, {
            'scatter': {
                'modes': ['lossy1', 'lossy2']
            }
        }, {
            'mesh': {
                'h': 0.02
            }
        }])


@unittest.mock.patch('cloaksim.cli.EigenvalueInteractor')
def test_main_ite_correct(mock_interactor, mock_initialize_application,
                          run_config, capsys):
    pair = EigenPair(0.354349 + 0j, 0.354349**2 + 0j, np.ones(2), 1e-12)
    mock_interactor().run.return_value = types.SimpleNamespace(
        solution=types.SimpleNamespace(pairs=[pair]))

    exit_code = main(['ite', '--oracle'])

    assert exit_code == EXIT_SUCCESS
    mock_interactor().run.assert_called_once_with(run_config,
                                                  with_roots=True)
    assert '0 0.354349 +0.000000i' in capsys.readouterr().out
    effective_config = (run_config.output_directory /
                        EFFECTIVE_CONFIG_FILE_NAME)
    assert 'h: 0.2' in effective_config.read_text()


@unittest.mock.patch('cloaksim.cli.CloakingInteractor')
def test_main_cloak_correct(mock_interactor, mock_initialize_application,
                            capsys):
    mock_interactor().run.return_value = types.SimpleNamespace(rows=[
        RatioRow(0.354349, 'idealized_dirichlet', 0.0329, 1e-4, 1200, 0.1)
    ])

    assert main(['cloak']) == EXIT_SUCCESS
    assert 'ratio=0.032900' in capsys.readouterr().out


@unittest.mock.patch('cloaksim.cli.CloakingInteractor')
def test_main_cloak_error(mock_interactor, mock_initialize_application):
    mock_interactor().run.side_effect = CloakSimError('fit failed')

    assert main(['cloak']) == EXIT_FAILURE


def test_main_initialization_error():
    with unittest.mock.patch('cloaksim.cli.initialize_application',
                             side_effect=SystemExit(1)):
        assert main(['ite']) == EXIT_FAILURE


@pytest.mark.parametrize('passed', [True, False])
@unittest.mock.patch('cloaksim.cli.ValidationInteractor')
def test_main_validate(mock_interactor, mock_initialize_application,
                       run_config, passed):
    check = types.SimpleNamespace(name='fem_patch', passed=passed,
                                  value=1e-3, threshold=1e-2)
    mock_interactor().run.return_value = types.SimpleNamespace(
        checks=[check], passed=passed)

    exit_code = main(['validate', '--quick', '--mass-perturbation', '0.01'])

    assert exit_code == (EXIT_SUCCESS if passed else EXIT_FAILURE)
    mock_interactor.assert_called_with(0.01)
    mock_interactor().run.assert_called_once_with(
        True, run_config.output_directory)


@unittest.mock.patch('cloaksim.cli.SweepInteractor')
def test_main_sweep(mock_interactor, mock_initialize_application):
    mock_interactor().run.return_value = types.SimpleNamespace(
        rows=[SweepRow(0.1, {'ratio': 0.1})])
    assert main(['sweep', '--axis', 'tau', '--values', '0.1']) == EXIT_SUCCESS
    call_args = mock_initialize_application.call_args.args
    assert {'sweep': {'axis': 'tau'}} in call_args[2]
    assert {'sweep': {'values': [0.1]}} in call_args[2]


@unittest.mock.patch('cloaksim.cli.SweepInteractor')
def test_main_sweep_failed_row(mock_interactor, mock_initialize_application,
                               capsys):
    mock_interactor().run.return_value = types.SimpleNamespace(rows=[
        SweepRow(0.1, {'ratio': 0.1}),
        SweepRow(0.2, {}, 'singular system')
    ])
    assert main(['sweep']) == EXIT_FAILURE
    assert 'failed: singular system' in capsys.readouterr().out


def test_main_mesh(mock_initialize_application, run_config):
    assert main(['mesh', '--include-exterior']) == EXIT_SUCCESS
    directory = run_config.output_directory
    assert (directory / 'mesh.txt').is_file()
    assert (directory / 'mesh_summary.csv').is_file()
    assert 'area_pml' in (directory / 'mesh_summary.csv').read_text()
