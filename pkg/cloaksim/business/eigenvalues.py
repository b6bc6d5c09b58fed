"""Business logic for computing interior transmission eigenvalues.

"""
import dataclasses
import logging
import pathlib
import time
import typing

from cloaksim.business.base import EigenSolution
from cloaksim.business.base import Interactor
from cloaksim.business.base import InteractorError
from cloaksim.configuration import RunConfig
from cloaksim.geometry import ShapeKind
from cloaksim.ite import extract_eigenfunctions
from cloaksim.oracles import RadialProblem
from cloaksim.oracles import RadialRoot
from cloaksim.oracles import radial_ite_roots
from cloaksim.reports import write_eigenfunction
from cloaksim.reports import write_eigenvalues
from cloaksim.reports import write_matrix
from cloaksim.reports import write_roots

_logger = logging.getLogger(__name__)

EIGENVALUES_FILE_NAME: typing.Final[str] = 'eigenvalues.csv'

ROOTS_FILE_NAME: typing.Final[str] = 'roots.csv'

A_MATRIX_FILE_NAME: typing.Final[str] = 'matrix_a.txt'

B_MATRIX_FILE_NAME: typing.Final[str] = 'matrix_b.txt'

_ORACLE_LOWER_BOUND: typing.Final[float] = 0.05


class EigenvalueInteractorError(InteractorError):
    """Exception class for all eigenvalue interactor errors.

    """
    pass


@dataclasses.dataclass(frozen=True, eq=False)
class EigenvalueReport:
    """Result of an eigenvalue run.

    Attributes
    ----------
    solution : EigenSolution
        The computed eigenpairs with their discretization.
    paths : list of pathlib.Path
        The written report files.
    seconds : float
        The wall-clock time of the run.

    """
    solution: EigenSolution
    paths: typing.List[pathlib.Path]
    seconds: float


class EigenvalueInteractor(Interactor):
    """Interactor for computing interior transmission eigenvalues.

    """
    @classmethod
    def get_error_class(cls) -> type[InteractorError]:
        # Docstring inherited
        return EigenvalueInteractorError

    def compute_eigenvalues(self, run_config: RunConfig) -> EigenSolution:
        """Compute the configured eigenvalues.

        Raises
        ------
        EigenvalueInteractorError
            If the eigenvalues cannot be computed.

        """
        try:
            return self._solve_eigenproblem(run_config)
        except Exception:
            raise self._create_error('unable to compute the eigenvalues',
                                     cavity_bc=run_config.ite.cavity_bc.value)

    def compute_roots(self, run_config: RunConfig,
                      upper: float) -> typing.List[RadialRoot]:
        """Compute the radially symmetric eigenvalues of a concentric
        disc geometry below an upper bound.

        Raises
        ------
        EigenvalueInteractorError
            If the geometry is not a pair of discs or the roots cannot
            be computed.

        """
        geometry = run_config.geometry
        if not (geometry.outer.kind is ShapeKind.CIRCLE
                and geometry.cavity.kind is ShapeKind.CIRCLE):
            raise self._create_error(
                'radial eigenvalues require concentric discs')
        try:
            problem = RadialProblem(run_config.ite.n_c, geometry.cavity.a,
                                    geometry.outer.a,
                                    run_config.ite.cavity_bc)
            return radial_ite_roots(problem, _ORACLE_LOWER_BOUND, upper)
        except Exception:
            raise self._create_error('unable to compute the radial roots',
                                     upper=upper)

    def run(self, run_config: RunConfig,
            with_roots: bool = False) -> EigenvalueReport:
        """Compute the configured eigenvalues and write the eigenvalue
        report (and the eigenfunctions if requested) to the output
        directory.

        Parameters
        ----------
        run_config : RunConfig
            The run settings.
        with_roots : bool
            True if the radially symmetric eigenvalues up to the
            largest computed one are written too (disc geometries
            only).

        Raises
        ------
        EigenvalueInteractorError
            If the eigenvalues cannot be computed or written.

        """
        start = time.perf_counter()
        solution = self.compute_eigenvalues(run_config)
        directory = run_config.output_directory
        try:
            paths = [
                write_eigenvalues(solution.pairs,
                                  directory / EIGENVALUES_FILE_NAME)
            ]
            if run_config.ite.dump_eigenfunctions:
                for index, pair in enumerate(solution.pairs):
                    v, w = extract_eigenfunctions(pair, solution.dofmap)
                    paths.append(
                        write_eigenfunction(
                            v, directory / f'eigenfunction_{index}_v.csv'))
                    paths.append(
                        write_eigenfunction(
                            w, directory / f'eigenfunction_{index}_w.csv'))
            if run_config.ite.dump_matrices:
                paths.append(
                    write_matrix(solution.system.a,
                                 directory / A_MATRIX_FILE_NAME))
                paths.append(
                    write_matrix(solution.system.b,
                                 directory / B_MATRIX_FILE_NAME))
        except Exception:
            raise self._create_error('unable to write the eigenvalues',
                                     directory=str(directory))
        if with_roots:
            upper = 1.1 * max(pair.kappa.real for pair in solution.pairs)
            roots = self.compute_roots(run_config, upper)
            try:
                paths.append(write_roots(roots, directory / ROOTS_FILE_NAME))
            except Exception:
                raise self._create_error('unable to write the radial roots',
                                         directory=str(directory))
        seconds = time.perf_counter() - start
        _logger.info(
            'eigenvalue run finished', extra={
                'kappas': [str(pair.kappa) for pair in solution.pairs],
                'seconds': seconds
            })
        return EigenvalueReport(solution, paths, seconds)
