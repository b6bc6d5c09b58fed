import cmath
import unittest.mock

import numpy as np
import pytest

from cloaksim.entities import CavityCondition
from cloaksim.fem import Form
from cloaksim.fem import assemble
from cloaksim.fem import build_dofmap
from cloaksim.geometry import RegionTag
from cloaksim.geometry import generate_mesh
from cloaksim.ite import RESIDUAL_TOLERANCE
from cloaksim.ite import EigenPair
from cloaksim.ite import EigenSolverError
from cloaksim.ite import assemble_blocks
from cloaksim.ite import extract_eigenfunctions
from cloaksim.ite import solve_dense
from cloaksim.ite import solve_near
from cloaksim.ite import solve_smallest
from cloaksim.oracles import RadialProblem
from cloaksim.oracles import radial_ite_roots

_N_C = 16.0

_SHIFT = 0.5


@pytest.fixture(scope='module')
def dirichlet_system(coarse_mesh):
    return assemble_blocks(coarse_mesh, build_dofmap(coarse_mesh), _N_C)


@pytest.fixture(scope='module')
def neumann_system(coarse_mesh):
    dofmap = build_dofmap(coarse_mesh,
                          cavity_condition=CavityCondition.NEUMANN)
    return assemble_blocks(coarse_mesh, dofmap, _N_C)


def test_assemble_blocks_dimensions_correct(dirichlet_system,
                                            neumann_system):
    dofmap = dirichlet_system.dofmap
    assert dirichlet_system.v_count == len(dofmap.cavity_interior)
    assert dirichlet_system.w_count == len(dofmap.interior)
    assert dirichlet_system.boundary_count == len(dofmap.boundary)
    assert dirichlet_system.a.shape == (dirichlet_system.dimension, ) * 2
    assert dirichlet_system.b.shape == (dirichlet_system.dimension, ) * 2
    assert neumann_system.v_count == (len(dofmap.cavity_interior) +
                                      len(dofmap.cavity_boundary))


def test_assemble_blocks_structure_correct(dirichlet_system):
    v, w = dirichlet_system.v_count, dirichlet_system.w_count
    a = dirichlet_system.a.tocsr()
    # The v and w unknowns couple only through the boundary block
    assert a[:v, v:v + w].nnz == 0
    assert a[v:v + w, :v].nnz == 0


@pytest.mark.parametrize('n_c', [0.0, -1.0])
def test_assemble_blocks_refractive_index_error(coarse_mesh, n_c):
    with pytest.raises(EigenSolverError):
        assemble_blocks(coarse_mesh, build_dofmap(coarse_mesh), n_c)


def test_assemble_blocks_foreign_dofmap_error(annulus_geometry,
                                              coarse_mesh):
    other_mesh = generate_mesh(annulus_geometry, 0.3)
    with pytest.raises(EigenSolverError):
        assemble_blocks(coarse_mesh, build_dofmap(other_mesh), _N_C)


def test_solve_near_matches_dense_correct(dirichlet_system):
    pairs = solve_near(dirichlet_system, _SHIFT, 3)
    lams, _ = solve_dense(dirichlet_system)
    target = _SHIFT**2
    nearest = lams[np.argsort(np.abs(lams - target))[:len(pairs)]]
    assert len(pairs) >= 3
    assert np.allclose(sorted(pair.lam.real for pair in pairs),
                       sorted(nearest.real), rtol=1e-8)
    distances = [abs(pair.lam - target) for pair in pairs]
    assert distances == sorted(distances)


def test_solve_near_residuals_correct(dirichlet_system):
    for pair in solve_near(dirichlet_system, _SHIFT, 3):
        assert pair.residual <= RESIDUAL_TOLERANCE
        assert pair.kappa.real >= 0
        assert pair.kappa**2 == pytest.approx(pair.lam)
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0)


def test_solve_near_count_error(dirichlet_system):
    with pytest.raises(EigenSolverError):
        solve_near(dirichlet_system, _SHIFT, 0)


@pytest.mark.parametrize('count, expected_lams',
                         [(1, [2 + 1j, 2 - 1j]), (2, [2 + 1j, 2 - 1j]),
                          (3, [2 + 1j, 2 - 1j, 5 + 0j])])
def test_solve_near_completes_conjugate_pair_correct(count, expected_lams):
    pairs = [
        EigenPair(cmath.sqrt(lam), lam, np.ones(2), 1e-12)
        for lam in (5 + 0j, 2 - 1j, 2 + 1j)
    ]
    with unittest.mock.patch('cloaksim.ite._eigenpairs',
                             return_value=pairs):
        selected = solve_near(unittest.mock.sentinel.system,
                              cmath.sqrt(2 + 1j), count)
    assert [pair.lam for pair in selected] == expected_lams


def test_solve_smallest_correct(neumann_system):
    pairs = solve_smallest(neumann_system, 3)
    assert 1 <= len(pairs) <= 3
    assert all(abs(pair.kappa) >= 1e-6 for pair in pairs)
    real_parts = [pair.kappa.real for pair in pairs]
    assert real_parts == sorted(real_parts)


def test_solve_smallest_count_error(neumann_system):
    with pytest.raises(EigenSolverError):
        solve_smallest(neumann_system, 0)


def test_extract_eigenfunctions_correct(dirichlet_system):
    pair = solve_near(dirichlet_system, _SHIFT, 1)[0]
    dofmap = dirichlet_system.dofmap
    v, w = extract_eigenfunctions(pair, dofmap)
    mass = assemble(dofmap.mesh, dofmap, Form.MASS)
    assert np.real(np.vdot(w, mass @ w)) == pytest.approx(1.0)
    significant = np.flatnonzero(np.abs(w) > 1e-8 * np.abs(w).max())[0]
    assert w[significant].imag == pytest.approx(0.0, abs=1e-12)
    assert w[significant].real > 0
    assert np.allclose(v[dofmap.boundary], w[dofmap.boundary])
    cavity_only = np.setdiff1d(dofmap.dofs_in(RegionTag.LOSSY),
                               dofmap.dofs_in(RegionTag.SHELL))
    assert np.all(np.isnan(v[cavity_only]))
    assert np.all(v[dofmap.cavity_boundary] == 0)


def test_extract_eigenfunctions_mismatch_error(dirichlet_system,
                                               neumann_system):
    pair = solve_near(dirichlet_system, _SHIFT, 1)[0]
    with pytest.raises(EigenSolverError):
        extract_eigenfunctions(pair, neumann_system.dofmap)


@pytest.mark.parametrize(('kappa', 'is_real'), [(0.5 + 0j, True),
                                                (0.5 + 1e-10j, True),
                                                (2.4 + 0.4j, False)])
def test_eigen_pair_is_real_correct(kappa, is_real):
    pair = EigenPair(kappa, kappa**2, np.ones(1), 0.0)
    assert pair.is_real is is_real


@pytest.mark.slow
def test_solve_near_converges_to_radial_roots(annulus_geometry):
    mesh = generate_mesh(annulus_geometry, 0.1)
    system = assemble_blocks(mesh, build_dofmap(mesh), _N_C)
    pairs = solve_near(system, _SHIFT, 5)
    roots = radial_ite_roots(
        RadialProblem(_N_C, 0.5, 1.0, CavityCondition.DIRICHLET), 0.2, 0.9)
    oracle = np.array([root.kappa for root in roots])
    for pair in pairs:
        assert pair.is_real
        assert np.min(np.abs(oracle - pair.kappa.real)) <= 1e-2 * abs(
            pair.kappa)


@pytest.mark.slow
def test_solve_near_table_two_complex_pair_correct(annulus_geometry):
    mesh = generate_mesh(annulus_geometry, 0.1)
    system = assemble_blocks(mesh, build_dofmap(mesh), _N_C)
    pairs = solve_near(system, 2.5, 10)
    complex_pairs = sorted((pair for pair in pairs if not pair.is_real),
                           key=lambda pair: abs(pair.kappa - 2.5))[:2]
    assert len(complex_pairs) == 2
    assert complex_pairs[0].kappa == pytest.approx(
        np.conj(complex_pairs[1].kappa), rel=1e-6)
    assert complex_pairs[0].kappa.real == pytest.approx(2.395, rel=2e-2)
    assert abs(complex_pairs[0].kappa.imag) == pytest.approx(0.41, rel=0.1)
