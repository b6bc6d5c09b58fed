import unittest.mock

import pytest

from cloaksim.business.eigenvalues import A_MATRIX_FILE_NAME
from cloaksim.business.eigenvalues import B_MATRIX_FILE_NAME
from cloaksim.business.eigenvalues import EIGENVALUES_FILE_NAME
from cloaksim.business.eigenvalues import ROOTS_FILE_NAME
from cloaksim.business.eigenvalues import EigenvalueInteractor
from cloaksim.business.eigenvalues import EigenvalueInteractorError
from cloaksim.entities import CavityCondition
from cloaksim.geometry import RegionTag


def test_compute_eigenvalues_correct(make_run_config):
    run_config = make_run_config({'ite': {'count': 3}})

    solution = EigenvalueInteractor().compute_eigenvalues(run_config)

    assert len(solution.pairs) >= 3
    assert solution.dofmap.cavity_condition is CavityCondition.DIRICHLET
    assert solution.system.dimension == solution.system.a.shape[0]
    assert not solution.mesh.has_region(RegionTag.EXTERIOR)
    distances = [abs(pair.lam - 1.0) for pair in solution.pairs]
    assert distances == sorted(distances)


def test_compute_eigenvalues_drops_core(make_run_config):
    run_config = make_run_config(
        {'ite': {
            'count': 2,
            'cavity_bc': 'neumann',
            'selection': 'smallest'
        }}, preset='fig10')

    solution = EigenvalueInteractor().compute_eigenvalues(run_config)

    assert not solution.mesh.has_region(RegionTag.CORE)
    assert solution.dofmap.cavity_condition is CavityCondition.NEUMANN
    assert len(solution.pairs) >= 2


@unittest.mock.patch('cloaksim.business.base.generate_mesh',
                     side_effect=ValueError('meshing failed'))
def test_compute_eigenvalues_error(mock_generate_mesh, make_run_config):
    with pytest.raises(EigenvalueInteractorError) as exception_info:
        EigenvalueInteractor().compute_eigenvalues(make_run_config())
    assert isinstance(exception_info.value.__cause__, ValueError)


def test_run_correct(make_run_config):
    run_config = make_run_config({
        'ite': {
            'count': 2,
            'dump_eigenfunctions': True,
            'dump_matrices': True
        }
    })

    report = EigenvalueInteractor().run(run_config)

    directory = run_config.output_directory
    assert report.seconds > 0.0
    eigenfunction_paths = [
        directory / f'eigenfunction_{index}_{name}.csv'
        for index in range(len(report.solution.pairs)) for name in ('v', 'w')
    ]
    assert report.paths == ([directory / EIGENVALUES_FILE_NAME] +
                            eigenfunction_paths + [
                                directory / A_MATRIX_FILE_NAME,
                                directory / B_MATRIX_FILE_NAME
                            ])
    assert all(path.is_file() for path in report.paths)
    lines = (directory / EIGENVALUES_FILE_NAME).read_text().splitlines()
    assert len(lines) == len(report.solution.pairs) + 1


def test_run_write_error(make_run_config):
    with unittest.mock.patch(
            'cloaksim.business.eigenvalues.write_eigenvalues',
            side_effect=OSError):
        with pytest.raises(EigenvalueInteractorError):
            EigenvalueInteractor().run(make_run_config({'ite': {
                'count': 1
            }}))


def test_compute_roots_requires_discs(make_run_config):
    run_config = make_run_config(preset='table5')
    with pytest.raises(EigenvalueInteractorError):
        EigenvalueInteractor().compute_roots(run_config, 1.0)


@pytest.mark.slow
def test_run_with_roots(make_run_config):
    run_config = make_run_config({'ite': {'count': 2}})

    report = EigenvalueInteractor().run(run_config, with_roots=True)

    roots_path = run_config.output_directory / ROOTS_FILE_NAME
    assert report.paths[-1] == roots_path
    rows = roots_path.read_text().splitlines()
    assert rows[0] == 'm,kappa'
    assert len(rows) > 1


@pytest.mark.slow
def test_table1_eigenvalues(make_run_config):
    run_config = make_run_config({
        'mesh': {
            'h': 0.1
        },
        'ite': {
            'shift': 0.5
        }
    }, preset='table1')

    solution = EigenvalueInteractor().compute_eigenvalues(run_config)

    kappas = sorted(pair.kappa.real for pair in solution.pairs)
    for kappa, expected in zip(
            kappas, [0.353965, 0.354349, 0.517122, 0.517444, 0.738215]):
        assert kappa == pytest.approx(expected, rel=1e-2)


def _assert_reproduced(pairs, expected_kappas, rel):
    kappas = [pair.kappa for pair in pairs]
    for expected in expected_kappas:
        distance = min(abs(kappa - expected) for kappa in kappas)
        assert distance <= rel * abs(expected), (expected, kappas)


@pytest.mark.slow
def test_table3_neumann_smallest_eigenvalues(make_run_config):
    run_config = make_run_config({'mesh': {'h': 0.05}}, preset='table3')

    solution = EigenvalueInteractor().compute_eigenvalues(run_config)

    assert solution.dofmap.cavity_condition is CavityCondition.NEUMANN
    _assert_reproduced(solution.pairs,
                       [1.646361, 1.647434, 1.692928, 1.694515, 1.842568],
                       1.5e-2)


@pytest.mark.slow
@pytest.mark.parametrize('preset, cavity_bc, expected_kappas', [
    ('table4', 'dirichlet', [
        2.097681, 2.165191, 2.207713, 2.220829, 2.225652 - 0.359758j,
        2.225652 + 0.359758j
    ]),
    ('table4', 'neumann',
     [1.483283, 1.533343, 1.594063, 1.597701, 1.747153, 1.751044]),
    ('table5', 'dirichlet', [
        1.800246 - 0.198428j, 1.800246 + 0.198428j, 2.170438, 2.317611,
        2.431338, 2.471902
    ]),
    ('table5', 'neumann',
     [0.761138, 1.192171, 1.649127, 1.678710, 1.679462, 1.736597])
])
def test_ellipse_and_square_eigenvalues(make_run_config, preset, cavity_bc,
                                        expected_kappas):
    selection = 'smallest' if cavity_bc == 'neumann' else 'nearest'
    run_config = make_run_config(
        {
            'mesh': {
                'h': 0.1
            },
            'ite': {
                'cavity_bc': cavity_bc,
                'selection': selection,
                'count': 8
            }
        }, preset=preset)

    solution = EigenvalueInteractor().compute_eigenvalues(run_config)

    _assert_reproduced(solution.pairs, expected_kappas, 2e-2)
