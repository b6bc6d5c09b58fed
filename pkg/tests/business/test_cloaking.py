import dataclasses
import math
import unittest.mock

import numpy as np
import pytest

from cloaksim.business.base import EigenSolution
from cloaksim.business.base import NoRealEigenvalueError
from cloaksim.business.cloaking import RATIOS_FILE_NAME
from cloaksim.business.cloaking import CloakingInteractor
from cloaksim.business.cloaking import CloakingInteractorError
from cloaksim.entities import ScatterMode
from cloaksim.ite import EigenPair

_FIG1_KAPPA = 0.354349


def test_compute_modes_no_modes(make_run_config):
    run_config = make_run_config()
    run_config = dataclasses.replace(
        run_config, scatter=dataclasses.replace(run_config.scatter,
                                                modes=()))
    with pytest.raises(CloakingInteractorError):
        CloakingInteractor().compute_modes(run_config)


def test_compute_mode_no_real_eigenvalue(make_run_config):
    pair = EigenPair(2.402496 - 0.415131j, (2.402496 - 0.415131j)**2,
                     np.ones(2), 1e-12)
    solution = EigenSolution(None, None, None, [pair])
    with pytest.raises(NoRealEigenvalueError):
        CloakingInteractor().compute_mode(make_run_config(preset='fig1'),
                                          ScatterMode.IDEALIZED_DIRICHLET,
                                          solution)


def test_compute_modes_missing_circle_radius(make_run_config):
    run_config = make_run_config({'herglotz': {'curve': 'circle'}},
                                 preset='fig1')
    with pytest.raises(CloakingInteractorError):
        CloakingInteractor().compute_modes(run_config)


@unittest.mock.patch('cloaksim.business.base.solve_near',
                     side_effect=RuntimeError('no convergence'))
def test_compute_modes_eigenvalue_error(mock_solve_near, make_run_config):
    with pytest.raises(CloakingInteractorError) as exception_info:
        CloakingInteractor().compute_modes(make_run_config(preset='fig1'))
    assert isinstance(exception_info.value.__cause__, RuntimeError)


def test_compute_modes_shares_eigenvalues(make_run_config):
    run_config = make_run_config(
        {'scatter': {
            'modes': ['idealized_dirichlet', 'lossy1']
        }}, preset='fig1')
    interactor = CloakingInteractor()
    with unittest.mock.patch.object(
            interactor, '_solve_eigenproblem',
            wraps=interactor._solve_eigenproblem) as mock_solve:
        results = interactor.compute_modes(run_config)
    assert mock_solve.call_count == 1
    assert [result.mode for result in results] == [
        ScatterMode.IDEALIZED_DIRICHLET, ScatterMode.LOSSY1
    ]
    assert results[0].pair is results[1].pair
    assert math.isnan(results[0].row.lossy_norm)
    assert results[1].row.lossy_norm > 0.0


def test_run_correct(make_run_config):
    run_config = make_run_config(preset='fig1')

    report = CloakingInteractor().run(run_config)

    directory = run_config.output_directory
    assert report.paths == [
        directory / RATIOS_FILE_NAME,
        directory / 'kernel_idealized_dirichlet.csv',
        directory / 'fields_idealized_dirichlet.csv'
    ]
    assert all(path.is_file() for path in report.paths)
    row = report.rows[0]
    assert row.mode == 'idealized_dirichlet'
    assert row.kappa == pytest.approx(_FIG1_KAPPA, rel=0.05)
    assert row.h == 0.2
    assert math.isfinite(row.ratio)
    assert row.dofs == report.results[0].solution.system.dofmap.dof_count
    fields = (directory / 'fields_idealized_dirichlet.csv').read_text()
    assert len(fields.splitlines()) == 11 * 11 + 1


def test_run_write_error(make_run_config):
    with unittest.mock.patch('cloaksim.business.cloaking.write_ratio_report',
                             side_effect=OSError):
        with pytest.raises(CloakingInteractorError):
            CloakingInteractor().run(make_run_config(preset='fig1'))


def _ratio_row(make_run_config, preset):
    run_config = make_run_config({'mesh': {'h': 0.1}}, preset=preset)
    return CloakingInteractor().compute_modes(run_config)[0].row


@pytest.mark.slow
@pytest.mark.parametrize('preset, kappa, lower, upper', [
    ('fig1', 0.354349, 0.0, 0.05),
    ('fig2', 3.028932, 0.0, 0.03),
    ('fig3', 3.857263, 0.0, 0.1),
    ('fig4', 1.890939, 0.0, 0.05),
    ('fig5', 2.097681, 0.0, 0.12),
    ('fig6', 1.747153, 0.0, 0.1),
    ('fig7', 2.431338, 0.5, math.inf),
    ('fig8', 0.761138, 0.5, math.inf),
    ('fig9', 3.857263, 0.0, 0.15),
    ('fig10', 1.890939, 0.0, 0.05),
    ('fig11', 2.097681, 0.1, 0.4),
    ('fig12', 1.747153, 0.0, 0.12)
])
def test_reported_scattering_ratios(make_run_config, preset, kappa, lower,
                                    upper):
    row = _ratio_row(make_run_config, preset)

    assert row.kappa == pytest.approx(kappa, rel=2e-2)
    assert lower <= row.ratio <= upper


@pytest.mark.slow
@pytest.mark.parametrize('square_preset, circle_preset', [('fig7', 'fig1'),
                                                          ('fig8', 'fig4')])
def test_square_cavity_not_invisible(make_run_config, square_preset,
                                     circle_preset):
    square = _ratio_row(make_run_config, square_preset)
    circle = _ratio_row(make_run_config, circle_preset)

    assert square.ratio > 5.0 * circle.ratio
