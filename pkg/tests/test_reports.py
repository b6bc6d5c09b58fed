import csv
import math
import types

import numpy as np
import pytest
import scipy.sparse

from cloaksim.herglotz import plane_wave_kernel
from cloaksim.ite import EigenPair
from cloaksim.oracles import RadialRoot
from cloaksim.reports import RatioRow
from cloaksim.reports import SweepRow
from cloaksim.reports import write_eigenfunction
from cloaksim.reports import write_eigenvalues
from cloaksim.reports import write_fields
from cloaksim.reports import write_kernel
from cloaksim.reports import write_matrix
from cloaksim.reports import write_mesh_summary
from cloaksim.reports import write_ratio_report
from cloaksim.reports import write_roots
from cloaksim.reports import write_sweep
from cloaksim.reports import write_validation
from cloaksim.scatter import FieldSample


def _read_rows(path):
    with path.open(newline='') as file:
        return list(csv.reader(file))


def test_write_eigenvalues(tmp_path):
    pairs = [
        EigenPair(0.354349 + 0j, 0.354349**2 + 0j, np.ones(2), 1e-12),
        EigenPair(2.402496 - 0.415131j, (2.402496 - 0.415131j)**2,
                  np.ones(2), 2e-11)
    ]
    path = write_eigenvalues(pairs, tmp_path / 'nested' / 'eigenvalues.csv')
    rows = _read_rows(path)
    assert rows[0] == ['index', 're_kappa', 'im_kappa', 'residual']
    assert len(rows) == 3
    assert rows[2][0] == '1'
    assert float(rows[2][1]) == 2.402496
    assert float(rows[2][2]) == -0.415131
    assert float(rows[1][3]) == 1e-12


def test_write_eigenfunction(tmp_path):
    path = write_eigenfunction(np.array([1.0, 2.0 + 3.0j]),
                               tmp_path / 'eigenfunction.csv')
    assert _read_rows(path) == [['node_index', 're', 'im'],
                                ['0', '1.0', '0.0'], ['1', '2.0', '3.0']]


def test_write_kernel(tmp_path):
    kernel = plane_wave_kernel(1.0, 1, 4)
    rows = _read_rows(write_kernel(kernel, tmp_path / 'kernel.csv'))
    assert rows[0] == ['theta_i', 're_g', 'im_g', 'omega_i']
    assert len(rows) == 5
    assert float(rows[2][0]) == pytest.approx(math.pi / 2.0)
    assert float(rows[2][1]) == pytest.approx(2.0 / math.pi)
    assert float(rows[1][1]) == 0.0
    assert float(rows[3][3]) == pytest.approx(math.pi / 2.0)


def test_write_ratio_report(tmp_path):
    rows = [
        RatioRow(0.354349, 'idealized_dirichlet', 0.0329, 1e-4, 1200, 0.1),
        RatioRow(3.857263, 'lossy1', 0.0614, 2e-4, 1500, 0.1, 0.5)
    ]
    written = _read_rows(write_ratio_report(rows, tmp_path / 'ratio.csv'))
    assert written[0] == ['kappa', 'mode', 'ratio', 'fit_residual', 'dofs',
                          'h', 'lossy_norm']
    assert written[1][1] == 'idealized_dirichlet'
    assert math.isnan(float(written[1][6]))
    assert float(written[2][6]) == 0.5


def test_write_fields(tmp_path):
    samples = [
        FieldSample(0.0, 0.0, None, None),
        FieldSample(1.5, -1.0, 0.5 + 0.25j, 1.0 - 1.0j),
        FieldSample(0.5, 0.5, 0j, 0j)
    ]
    rows = _read_rows(write_fields(samples, tmp_path / 'fields.csv'))
    assert rows[0] == ['x', 'y', 're_us', 'im_us', 're_ui', 'im_ui', 're_u',
                       'im_u', 'masked']
    assert rows[1] == ['0.0', '0.0', '', '', '', '', '', '', '1']
    assert [float(value) for value in rows[2]] == [
        1.5, -1.0, 0.5, 0.25, 1.0, -1.0, 1.5, -0.75, 0.0
    ]
    assert [float(value) for value in rows[3]] == [0.5, 0.5] + [0.0] * 7


def test_write_roots(tmp_path):
    roots = [RadialRoot(0.3538, 0, 1), RadialRoot(0.5171, 1, 2)]
    rows = _read_rows(write_roots(roots, tmp_path / 'roots.csv'))
    assert rows == [['m', 'kappa'], ['0', '0.3538'], ['1', '0.5171']]


def test_write_sweep(tmp_path):
    rows = [
        SweepRow(0.1, {
            'ratio_lossy1': 0.06,
            'kappa_lossy1': 3.85
        }),
        SweepRow(0.05, {}, 'singular system'),
        SweepRow(0.01, {
            'ratio_lossy1': 0.07,
            'lossy_norm_lossy1': 0.2
        })
    ]
    written = _read_rows(write_sweep('tau', rows, tmp_path / 'sweep.csv'))
    assert written[0] == [
        'tau', 'ratio_lossy1', 'kappa_lossy1', 'lossy_norm_lossy1', 'error'
    ]
    assert written[1] == ['0.1', '0.06', '3.85', 'nan', '']
    assert written[2][0] == '0.05'
    assert written[2][-1] == 'singular system'
    assert written[3][3] == '0.2'


def test_write_validation(tmp_path):
    check = types.SimpleNamespace(name='fem_patch', passed=True, value=1e-3,
                                  threshold=1e-2, seconds=0.5)
    rows = _read_rows(write_validation([check],
                                       tmp_path / 'validation.csv'))
    assert rows == [['name', 'passed', 'value', 'threshold', 'seconds'],
                    ['fem_patch', '1', '0.001', '0.01', '0.5']]


def test_write_matrix_real(tmp_path):
    matrix = scipy.sparse.csr_matrix(np.array([[0.0, 2.5], [-1.0, 0.0]]))
    path = write_matrix(matrix, tmp_path / 'matrix.txt')
    assert path.read_text().splitlines() == ['0 1 2.5', '1 0 -1.0']


def test_write_matrix_complex(tmp_path):
    matrix = scipy.sparse.coo_matrix(
        (np.array([1.0 - 2.0j, 3.0j]), (np.array([1, 0]), np.array([0, 1]))),
        shape=(2, 2))
    path = write_matrix(matrix, tmp_path / 'matrix.txt')
    assert path.read_text().splitlines() == ['0 1 0.0 3.0',
                                             '1 0 1.0 -2.0']


def test_write_mesh_summary(tmp_path, coarse_mesh):
    path = write_mesh_summary(coarse_mesh, tmp_path / 'mesh_summary.csv')
    summary = {row[0]: row[1] for row in _read_rows(path)[1:]}
    assert int(summary['nodes']) == coarse_mesh.node_count
    assert int(summary['triangles']) == coarse_mesh.triangle_count
    assert float(summary['min_angle']) > 0.0
    assert 'area_shell' in summary
    assert 'area_lossy' in summary
    assert 'area_pml' not in summary
