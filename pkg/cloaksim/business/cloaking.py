"""Business logic for synthesizing near-invisibility incident waves and
verifying them by scattering simulations.

"""
import dataclasses
import logging
import pathlib
import typing

from cloaksim.business.base import EigenSolution
from cloaksim.business.base import Interactor
from cloaksim.business.base import InteractorError
from cloaksim.configuration import FitCurve
from cloaksim.configuration import RunConfig
from cloaksim.configuration import SelectionStrategy
from cloaksim.entities import CavityCondition
from cloaksim.entities import ScatterMode
from cloaksim.fem import build_dofmap
from cloaksim.geometry import Shape
from cloaksim.geometry import generate_mesh
from cloaksim.herglotz import HerglotzKernel
from cloaksim.herglotz import fit_eigenfunction
from cloaksim.ite import EigenPair
from cloaksim.reports import RatioRow
from cloaksim.reports import write_fields
from cloaksim.reports import write_kernel
from cloaksim.reports import write_ratio_report
from cloaksim.scatter import MediumSpec
from cloaksim.scatter import ScatterSolution
from cloaksim.scatter import assemble_scatter
from cloaksim.scatter import export_fields
from cloaksim.scatter import grid_points
from cloaksim.scatter import lossy_layer_norm
from cloaksim.scatter import solve_scatter

_logger = logging.getLogger(__name__)

RATIOS_FILE_NAME: typing.Final[str] = 'ratios.csv'


class CloakingInteractorError(InteractorError):
    """Exception class for all cloaking interactor errors.

    """
    pass


@dataclasses.dataclass(frozen=True, eq=False)
class CloakResult:
    """Result of the cloaking pipeline for one scattering mode.

    Attributes
    ----------
    mode : ScatterMode
        The scattering mode.
    pair : EigenPair
        The eigenpair the incident wave was built from.
    kernel : HerglotzKernel
        The fitted Herglotz kernel.
    solution : ScatterSolution
        The scattering solution.
    row : RatioRow
        The ratio report row.

    """
    mode: ScatterMode
    pair: EigenPair
    kernel: HerglotzKernel
    solution: ScatterSolution
    row: RatioRow


@dataclasses.dataclass(frozen=True, eq=False)
class CloakReport:
    results: typing.List[CloakResult]
    paths: typing.List[pathlib.Path]

    @property
    def rows(self) -> typing.List[RatioRow]:
        return [result.row for result in self.results]


class CloakingInteractor(Interactor):
    """Interactor for the cloaking pipeline: eigenvalue selection,
    Herglotz fit and scattering verification.

    """
    @classmethod
    def get_error_class(cls) -> type[InteractorError]:
        # Docstring inherited
        return CloakingInteractorError

    def compute_modes(self, run_config: RunConfig) -> typing.List[CloakResult]:
        """Run the cloaking pipeline for every configured scattering
        mode (modes realising the same cavity condition share one
        eigenvalue computation).

        Raises
        ------
        CloakingInteractorError
            If a pipeline step fails.

        """
        if len(run_config.scatter.modes) == 0:
            raise self._create_error('no scattering modes configured')
        solutions: typing.Dict[CavityCondition, EigenSolution] = {}
        results = []
        for mode in run_config.scatter.modes:
            condition = (run_config.ite.cavity_bc if mode.cavity_condition
                         is None else mode.cavity_condition)
            try:
                if condition not in solutions:
                    solutions[condition] = self._solve_eigenproblem(
                        run_config, condition, self.__target(run_config))
            except CloakingInteractorError:
                raise
            except Exception:
                raise self._create_error(
                    'unable to compute the eigenvalues',
                    cavity_bc=condition.value)
            results.append(
                self.compute_mode(run_config, mode, solutions[condition]))
        return results

    def compute_mode(self, run_config: RunConfig, mode: ScatterMode,
                     eigen_solution: EigenSolution) -> CloakResult:
        """Run the Herglotz fit and the scattering simulation of one
        scattering mode.

        Raises
        ------
        CloakingInteractorError
            If no real eigenvalue is available or a step fails.

        """
        target = self.__target(run_config)
        pair = self._select_real_pair(
            eigen_solution, 0.0 if target is None else target.real)
        kappa = pair.kappa.real
        extra_info = {'mode': mode.value, 'kappa': kappa}
        try:
            kernel = self.__fit_kernel(run_config, pair, eigen_solution)
            if (kernel.fit_residual >
                    run_config.herglotz.residual_threshold):
                _logger.warning(
                    'Herglotz fit residual above threshold', extra=dict(
                        extra_info, fit_residual=kernel.fit_residual,
                        threshold=run_config.herglotz.residual_threshold))
            solution = self.__scatter(run_config, mode, kernel)
        except CloakingInteractorError:
            raise
        except Exception:
            raise self._create_error('unable to verify the cloak',
                                     **extra_info)
        row = RatioRow(kappa, mode.value, solution.ratio,
                       kernel.fit_residual, solution.system.dofmap.dof_count,
                       run_config.mesh.h, lossy_layer_norm(solution))
        _logger.info('cloak verified',
                     extra=dict(extra_info, ratio=solution.ratio,
                                fit_residual=kernel.fit_residual))
        return CloakResult(mode, pair, kernel, solution, row)

    def run(self, run_config: RunConfig) -> CloakReport:
        """Run the cloaking pipeline and write the ratio report, the
        kernels and the field grids to the output directory.

        Raises
        ------
        CloakingInteractorError
            If a pipeline step fails or the reports cannot be written.

        """
        results = self.compute_modes(run_config)
        directory = run_config.output_directory
        box_halfwidth = run_config.geometry.box_halfwidth
        points = grid_points(box_halfwidth, run_config.scatter.grid_points)
        try:
            paths = [
                write_ratio_report([result.row for result in results],
                                   directory / RATIOS_FILE_NAME)
            ]
            for result in results:
                name = result.mode.value
                paths.append(
                    write_kernel(result.kernel,
                                 directory / f'kernel_{name}.csv'))
                paths.append(
                    write_fields(export_fields(result.solution, points),
                                 directory / f'fields_{name}.csv'))
        except Exception:
            raise self._create_error('unable to write the cloak reports',
                                     directory=str(directory))
        return CloakReport(results, paths)

    def __target(self, run_config: RunConfig) -> typing.Optional[complex]:
        if run_config.scatter.kappa is not None:
            return complex(run_config.scatter.kappa)
        if run_config.ite.selection is SelectionStrategy.SMALLEST:
            return None
        return run_config.ite.target

    def __fit_kernel(self, run_config: RunConfig, pair: EigenPair,
                     eigen_solution: EigenSolution) -> HerglotzKernel:
        settings = run_config.herglotz
        geometry = run_config.geometry
        curve: typing.Optional[Shape] = None
        if settings.curve is FitCurve.CAVITY:
            curve = geometry.cavity
        elif settings.curve is FitCurve.CIRCLE:
            if settings.curve_radius is None:
                raise self._create_error('fitting circle radius missing')
            curve = Shape.circle(settings.curve_radius)
        return fit_eigenfunction(pair, eigen_solution.dofmap, geometry.outer,
                                 curve=curve, directions=settings.directions,
                                 points=settings.points,
                                 regularizer=settings.regularizer)

    def __scatter(self, run_config: RunConfig, mode: ScatterMode,
                  kernel: HerglotzKernel) -> ScatterSolution:
        geometry = run_config.geometry
        if mode.is_idealized:
            geometry = dataclasses.replace(geometry, core=None)
        settings = run_config.scatter
        geometry.validate_evaluation_radius(settings.evaluation_radius)
        mesh = generate_mesh(geometry, run_config.mesh.h,
                             include_exterior=True,
                             keep_cavity=not mode.is_idealized)
        dofmap = build_dofmap(mesh, run_config.mesh.degree)
        medium = MediumSpec.create(mode, run_config.ite.n_c,
                                   gamma=settings.gamma, tau=settings.tau,
                                   alpha=settings.alpha, beta=settings.beta,
                                   sigma_core=settings.sigma_core,
                                   n_core=settings.n_core,
                                   cavity=settings.cavity)
        system = assemble_scatter(mesh, dofmap, medium, kernel.kappa,
                                  run_config.pml_config, kernel)
        return solve_scatter(system, settings.evaluation_radius,
                             settings.ratio_points)
