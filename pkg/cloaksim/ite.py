"""Module for the discrete interior transmission eigenvalue problem with
a cavity: block pencil assembly and shift-and-invert eigensolvers.

The unknowns are ordered as x = [v0, w0, vB] with v0 in the v-space of
the DoF map, w0 in S_h^0 and vB in S_h^B (shared by v and w).

"""
import dataclasses
import logging
import math
import typing

import numpy as np
import scipy.linalg  # type: ignore
import scipy.sparse  # type: ignore
import scipy.sparse.linalg  # type: ignore

from cloaksim.exceptions import CloakSimError
from cloaksim.fem import DofMap
from cloaksim.fem import Form
from cloaksim.fem import assemble
from cloaksim.geometry import Mesh
from cloaksim.geometry import RegionTag

_logger = logging.getLogger(__name__)

DENSE_DIMENSION_LIMIT: typing.Final[int] = 2000
"""Largest pencil dimension solved by the dense QZ fallback."""

RESIDUAL_TOLERANCE: typing.Final[float] = 1e-8
"""Largest accepted eigenpair residual."""

SMALLEST_SHIFT: typing.Final[float] = 0.1
"""Shift (in kappa) used to compute the smallest eigenvalues."""

ZERO_EIGENVALUE_THRESHOLD: typing.Final[float] = 1e-6
"""Eigenvalues with smaller |kappa| are discarded as trivial."""

_ARNOLDI_TOLERANCE: typing.Final[float] = 1e-10
_ARNOLDI_MAX_ITERATIONS: typing.Final[int] = 300
_MIN_SUBSPACE_DIMENSION: typing.Final[int] = 40
_SHIFT_PERTURBATIONS: typing.Final[int] = 3
_REFINEMENT_STEPS: typing.Final[int] = 3
_SMALLEST_EXTRA_COUNT: typing.Final[int] = 4


class EigenSolverError(CloakSimError):
    """Exception class for all eigensolver errors.

    """
    pass


class SingularShiftError(EigenSolverError):
    """Exception to be raised if the shifted pencil cannot be factorized
    even after perturbing the shift.

    """
    def __init__(self, **kwargs: typing.Any):
        # Docstring inherited
        super().__init__('shifted pencil is singular', **kwargs)


class NoConvergenceError(EigenSolverError):
    """Exception to be raised if the eigensolver does not converge.

    """
    def __init__(self, **kwargs: typing.Any):
        # Docstring inherited
        super().__init__('eigensolver did not converge', **kwargs)


@dataclasses.dataclass(frozen=True, eq=False)
class BlockSystem:
    """Block pencil (A, B) of the discrete interior transmission
    eigenvalue problem.

    Attributes
    ----------
    a : scipy.sparse.csr_matrix
        The block stiffness matrix.
    b : scipy.sparse.csr_matrix
        The block mass matrix.
    dofmap : DofMap
        The DoF map defining the block layout.
    n_c : float
        The refractive index of the shell.

    """
    a: scipy.sparse.csr_matrix
    b: scipy.sparse.csr_matrix
    dofmap: DofMap
    n_c: float

    @property
    def v_count(self) -> int:
        return len(self.dofmap.v_space)

    @property
    def w_count(self) -> int:
        return len(self.dofmap.interior)

    @property
    def boundary_count(self) -> int:
        return len(self.dofmap.boundary)

    @property
    def dimension(self) -> int:
        return self.v_count + self.w_count + self.boundary_count


@dataclasses.dataclass(frozen=True, eq=False)
class EigenPair:
    """Interior transmission eigenpair.

    Attributes
    ----------
    kappa : complex
        The eigenvalue kappa (with non-negative real part).
    lam : complex
        The pencil eigenvalue lambda = kappa^2.
    vector : np.ndarray
        The block eigenvector [v0, w0, vB] (unit Euclidean norm).
    residual : float
        The residual ||A x - lambda B x|| / ||x||.

    """
    kappa: complex
    lam: complex
    vector: np.ndarray
    residual: float

    @property
    def is_real(self) -> bool:
        return abs(self.kappa.imag) <= 1e-8 * max(1.0, abs(self.kappa.real))


def _submatrix(matrix: scipy.sparse.csr_matrix, rows: np.ndarray,
               columns: np.ndarray) -> scipy.sparse.csr_matrix:
    return matrix[rows, :][:, columns]


def assemble_blocks(mesh: Mesh, dofmap: DofMap, n_c: float) -> BlockSystem:
    """Assemble the block pencil of the interior transmission eigenvalue
    problem.

    Parameters
    ----------
    mesh : Mesh
        The mesh of Omega including the cavity D.
    dofmap : DofMap
        The DoF map (its cavity condition selects the v-space).
    n_c : float
        The refractive index of the shell.

    Returns
    -------
    BlockSystem
        The block pencil.

    Raises
    ------
    EigenSolverError
        If n_c is not positive, the DoF map belongs to another mesh, or
        a block is empty.

    """
    if not n_c > 0:
        raise EigenSolverError('refractive index must be positive', n_c=n_c)
    if dofmap.mesh is not mesh:
        raise EigenSolverError('DoF map built on a different mesh')
    v_space, interior, boundary = (dofmap.v_space, dofmap.interior,
                                   dofmap.boundary)
    if min(len(v_space), len(interior), len(boundary)) == 0:
        raise EigenSolverError('empty block in the eigenvalue problem',
                               v_dofs=len(v_space), w_dofs=len(interior),
                               boundary_dofs=len(boundary))
    stiffness = assemble(mesh, dofmap, Form.STIFFNESS)
    mass = assemble(mesh, dofmap, Form.MASS)
    shell_stiffness = assemble(mesh, dofmap, Form.STIFFNESS,
                               regions=[RegionTag.SHELL])
    shell_mass = assemble(mesh, dofmap, Form.MASS, regions=[RegionTag.SHELL],
                          coeff=n_c)

    def blocks(shell: scipy.sparse.csr_matrix,
               full: scipy.sparse.csr_matrix) -> scipy.sparse.csr_matrix:
        matrix = scipy.sparse.bmat(
            [[
                _submatrix(shell, v_space, v_space), None,
                _submatrix(shell, v_space, boundary)
            ],
             [
                 None,
                 _submatrix(full, interior, interior),
                 _submatrix(full, interior, boundary)
             ],
             [
                 _submatrix(shell, boundary, v_space),
                 -_submatrix(full, boundary, interior),
                 _submatrix(shell, boundary, boundary) -
                 _submatrix(full, boundary, boundary)
             ]], format='csr')
        matrix.eliminate_zeros()
        return matrix

    system = BlockSystem(blocks(shell_stiffness, stiffness),
                         blocks(shell_mass, mass), dofmap, float(n_c))
    _logger.info(
        'eigenvalue problem assembled', extra={
            'dimension': system.dimension,
            'cavity_condition': dofmap.cavity_condition.value,
            'n_c': n_c
        })
    return system


def _kappa(lam: complex) -> complex:
    kappa = complex(np.sqrt(complex(lam)))
    return -kappa if kappa.real < 0 else kappa


def _residual(system: BlockSystem, lam: complex, vector: np.ndarray) -> float:
    return float(
        np.linalg.norm(system.a @ vector - lam * (system.b @ vector)) /
        np.linalg.norm(vector))


def _factorize(system: BlockSystem, target: complex) \
        -> typing.Tuple[typing.Any, complex]:
    for attempt in range(_SHIFT_PERTURBATIONS + 1):
        shifted = system.a - target * system.b
        if isinstance(target, complex) or np.iscomplexobj(shifted):
            shifted = shifted.astype(complex)
        try:
            return scipy.sparse.linalg.splu(shifted.tocsc()), target
        except RuntimeError:
            perturbed = target + 1e-6 * max(1.0, abs(target)) * (attempt + 1)
            _logger.warning('singular shift perturbed',
                            extra={
                                'shift': target,
                                'perturbed_shift': perturbed
                            })
            target = perturbed
    raise SingularShiftError(shift=target)


def _refine(system: BlockSystem, lam: complex,
            vector: np.ndarray) -> typing.Tuple[complex, np.ndarray, float]:
    residual = _residual(system, lam, vector)
    for _ in range(_REFINEMENT_STEPS):
        if residual <= RESIDUAL_TOLERANCE:
            break
        try:
            factorization = scipy.sparse.linalg.splu(
                (system.a - lam * system.b).astype(complex).tocsc())
        except RuntimeError:
            # The eigenvalue itself makes the pencil singular
            break
        vector = factorization.solve(
            (system.b @ vector).astype(complex))
        vector /= np.linalg.norm(vector)
        lam = complex(
            np.vdot(vector, system.a @ vector) /
            np.vdot(vector, system.b @ vector))
        residual = _residual(system, lam, vector)
    return lam, vector, residual


def _arnoldi(system: BlockSystem, target: complex,
             count: int) -> typing.Tuple[np.ndarray, np.ndarray]:
    factorization, target = _factorize(system, target)
    dtype = complex if isinstance(target, complex) else float
    b = system.b

    def matvec(x: np.ndarray) -> np.ndarray:
        return factorization.solve(np.asarray(b @ x, dtype=dtype))

    dimension = system.dimension
    operator = scipy.sparse.linalg.LinearOperator((dimension, dimension),
                                                  matvec=matvec, dtype=dtype)
    requested = min(count + 2, dimension - 2)
    subspace = min(dimension, max(4 * count, _MIN_SUBSPACE_DIMENSION))
    start = np.random.default_rng(0).standard_normal(dimension)
    mu, vectors = scipy.sparse.linalg.eigs(operator, k=requested,
                                           ncv=subspace, which='LM',
                                           v0=start, tol=_ARNOLDI_TOLERANCE,
                                           maxiter=_ARNOLDI_MAX_ITERATIONS)
    finite = np.abs(mu) > 0
    return target + 1.0 / mu[finite], vectors[:, finite]


def solve_dense(system: BlockSystem) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Solve the full pencil with the dense QZ algorithm.

    Returns
    -------
    tuple of np.ndarray
        The finite eigenvalues lambda and the eigenvectors (columns).

    Raises
    ------
    EigenSolverError
        If the pencil is too large for dense solution.

    """
    if system.dimension > DENSE_DIMENSION_LIMIT:
        raise EigenSolverError('pencil too large for dense solution',
                               dimension=system.dimension)
    values, vectors = scipy.linalg.eig(system.a.toarray(), system.b.toarray())
    finite = np.isfinite(values)
    return values[finite], vectors[:, finite]


def _select(lams: np.ndarray, target: complex, count: int) -> np.ndarray:
    distances = np.abs(lams - target)
    order = sorted(range(len(lams)),
                   key=lambda i: (round(float(distances[i]), 10),
                                  lams[i].real, lams[i].imag))
    selected = order[:count]
    if len(selected) < len(order) and abs(lams[selected[-1]].imag) > 0:
        # Keep the complex conjugate partner of the last selected value
        last = lams[selected[-1]]
        partner = order[count]
        if abs(lams[partner] - np.conj(last)) <= 1e-8 * max(1.0, abs(last)):
            selected.append(partner)
    return np.array(selected, dtype=np.int64)


def _eigenpairs(system: BlockSystem, target: complex,
                count: int) -> typing.List[EigenPair]:
    if system.dimension <= count + 3:
        lams, vectors = solve_dense(system)
    else:
        try:
            lams, vectors = _arnoldi(system, target, count)
        except (scipy.sparse.linalg.ArpackNoConvergence,
                scipy.sparse.linalg.ArpackError) as error:
            if system.dimension > DENSE_DIMENSION_LIMIT:
                raise NoConvergenceError(shift=target,
                                         dimension=system.dimension) \
                    from error
            _logger.warning('Arnoldi iteration failed, falling back to QZ',
                            extra={'dimension': system.dimension})
            lams, vectors = solve_dense(system)
    pairs = []
    for index in _select(lams, target, count + _SMALLEST_EXTRA_COUNT):
        vector = vectors[:, index] / np.linalg.norm(vectors[:, index])
        lam, vector, residual = _refine(system, complex(lams[index]), vector)
        if residual > RESIDUAL_TOLERANCE:
            _logger.warning('eigenpair rejected',
                            extra={
                                'lam': lam,
                                'residual': residual
                            })
            continue
        pairs.append(EigenPair(_kappa(lam), lam, vector, residual))
    return pairs


def _order(pairs: typing.List[EigenPair], target: complex,
           count: int) -> typing.List[EigenPair]:
    lams = np.array([pair.lam for pair in pairs])
    return [pairs[index] for index in _select(lams, target, count)]


def solve_near(system: BlockSystem, shift: complex,
               count: int) -> typing.List[EigenPair]:
    """Compute the eigenpairs whose lambda is closest to shift^2.

    Parameters
    ----------
    system : BlockSystem
        The block pencil.
    shift : complex
        The kappa-shift s (the pencil is shifted by s^2).
    count : int
        The number of eigenpairs.

    Returns
    -------
    list of EigenPair
        The eigenpairs ordered by |lambda - s^2|. Complex eigenvalues of
        the real pencil come in conjugate pairs, so if the last selected
        eigenvalue is complex and its conjugate partner would be cut
        off, the partner is appended and count + 1 pairs are returned.

    Raises
    ------
    EigenSolverError
        If the count is invalid, the shift is singular, or the solver
        does not converge.

    """
    if count < 1:
        raise EigenSolverError('eigenpair count must be positive', count=count)
    target = shift * shift
    if isinstance(target, complex) and target.imag == 0:
        target = target.real
    pairs = _order(_eigenpairs(system, target, count), target, count)
    if len(pairs) == 0:
        raise NoConvergenceError(shift=shift)
    _logger.info('eigenvalues computed',
                 extra={
                     'shift': shift,
                     'kappas': [pair.kappa for pair in pairs]
                 })
    return pairs


def solve_smallest(system: BlockSystem, count: int) -> typing.List[EigenPair]:
    """Compute the eigenpairs with the smallest real parts of kappa,
    discarding the trivial eigenvalue kappa = 0.

    Raises
    ------
    EigenSolverError
        If the count is invalid or the solver does not converge.

    """
    if count < 1:
        raise EigenSolverError('eigenpair count must be positive', count=count)
    target = SMALLEST_SHIFT**2
    candidates = _eigenpairs(system, target, count + _SMALLEST_EXTRA_COUNT)
    nontrivial = [
        pair for pair in candidates
        if abs(pair.kappa) >= ZERO_EIGENVALUE_THRESHOLD
    ]
    nontrivial.sort(key=lambda pair: (round(pair.kappa.real, 10),
                                      pair.kappa.imag))
    pairs = nontrivial[:count]
    if len(pairs) == 0:
        raise NoConvergenceError(shift=SMALLEST_SHIFT)
    _logger.info('smallest eigenvalues computed',
                 extra={'kappas': [pair.kappa for pair in pairs]})
    return pairs


def extract_eigenfunctions(
        pair: EigenPair,
        dofmap: DofMap) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Extract the normalized eigenfunctions v (on Omega minus D) and w
    (on Omega) from an eigenpair.

    The fields are scaled such that the L2(Omega) norm of w is one and
    the first significant coefficient of w is real and positive. The
    values of v at DoFs strictly inside D are NaN.

    Raises
    ------
    EigenSolverError
        If the eigenvector does not match the DoF map or w vanishes.

    """
    v_space, interior, boundary = (dofmap.v_space, dofmap.interior,
                                   dofmap.boundary)
    if len(pair.vector) != len(v_space) + len(interior) + len(boundary):
        raise EigenSolverError('eigenvector does not match DoF map',
                               length=len(pair.vector))
    v0 = pair.vector[:len(v_space)]
    w0 = pair.vector[len(v_space):len(v_space) + len(interior)]
    boundary_values = pair.vector[len(v_space) + len(interior):]
    v = np.full(dofmap.dof_count, np.nan, dtype=complex)
    v[dofmap.dofs_in(RegionTag.SHELL)] = 0.0
    v[v_space] = v0
    v[boundary] = boundary_values
    w = np.zeros(dofmap.dof_count, dtype=complex)
    w[interior] = w0
    w[boundary] = boundary_values
    mass = assemble(dofmap.mesh, dofmap, Form.MASS)
    norm = math.sqrt(max(float(np.real(np.vdot(w, mass @ w))), 0.0))
    if norm == 0.0 or not np.isfinite(norm):
        raise EigenSolverError('eigenfunction w vanishes', kappa=pair.kappa)
    magnitudes = np.abs(w)
    first = int(np.flatnonzero(magnitudes > 1e-8 * magnitudes.max())[0])
    scale = np.conj(w[first]) / (magnitudes[first] * norm)
    return v * scale, w * scale
