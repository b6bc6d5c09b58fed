"""Base classes for all business logic interactors and errors.

"""
import dataclasses
import logging
import typing

from cloaksim.configuration import RunConfig
from cloaksim.configuration import SelectionStrategy
from cloaksim.entities import CavityCondition
from cloaksim.exceptions import CloakSimError
from cloaksim.exceptions import ErrorCreator
from cloaksim.fem import DofMap
from cloaksim.fem import build_dofmap
from cloaksim.geometry import Mesh
from cloaksim.geometry import generate_mesh
from cloaksim.ite import BlockSystem
from cloaksim.ite import EigenPair
from cloaksim.ite import assemble_blocks
from cloaksim.ite import solve_near
from cloaksim.ite import solve_smallest

_logger = logging.getLogger(__name__)


class InteractorError(CloakSimError):
    """Base exception class for all interactor errors.

    """
    pass


class NoRealEigenvalueError(InteractorError):
    """Exception to be raised if no real eigenvalue is available to
    build a cloaking incident wave from.

    """
    def __init__(self, **kwargs: typing.Any):
        # Docstring inherited
        super().__init__('no real eigenvalue found', **kwargs)


@dataclasses.dataclass(frozen=True, eq=False)
class EigenSolution:
    """Eigenpairs of the interior transmission problem on a mesh.

    Attributes
    ----------
    mesh : Mesh
        The mesh of Omega.
    dofmap : DofMap
        The DoF map the eigenpairs were computed on.
    system : BlockSystem
        The assembled block pencil.
    pairs : list of EigenPair
        The computed eigenpairs.

    """
    mesh: Mesh
    dofmap: DofMap
    system: BlockSystem
    pairs: typing.List[EigenPair]


class Interactor(ErrorCreator[InteractorError]):
    """Base class for all interactors.

    """
    def _solve_eigenproblem(
            self, run_config: RunConfig,
            cavity_condition: typing.Optional[CavityCondition] = None,
            target: typing.Optional[complex] = None) -> EigenSolution:
        """Mesh Omega and compute the configured eigenpairs.

        Parameters
        ----------
        run_config : RunConfig
            The run settings.
        cavity_condition : CavityCondition or None
            The cavity condition (the configured one if None).
        target : complex or None
            The kappa-shift overriding the configured selection.

        """
        settings = run_config.ite
        condition = (settings.cavity_bc
                     if cavity_condition is None else cavity_condition)
        # The core only matters for the scattering media
        geometry = dataclasses.replace(run_config.geometry, core=None)
        mesh = generate_mesh(geometry, run_config.mesh.h)
        dofmap = build_dofmap(mesh, run_config.mesh.degree, condition)
        system = assemble_blocks(mesh, dofmap, settings.n_c)
        if target is not None:
            pairs = solve_near(system, target, settings.count)
        elif settings.selection is SelectionStrategy.SMALLEST:
            pairs = solve_smallest(system, settings.count)
        else:
            pairs = solve_near(system, settings.target, settings.count)
        _logger.info(
            'interior transmission eigenproblem solved', extra={
                'cavity_bc': condition.value,
                'dimension': system.dimension,
                'eigenvalues': len(pairs)
            })
        return EigenSolution(mesh, dofmap, system, pairs)

    def _select_real_pair(self, solution: EigenSolution,
                          target: float) -> EigenPair:
        real_pairs = [pair for pair in solution.pairs if pair.is_real]
        if len(real_pairs) == 0:
            raise NoRealEigenvalueError(
                target=target,
                kappas=[str(pair.kappa) for pair in solution.pairs])
        return min(real_pairs,
                   key=lambda pair: (abs(pair.kappa.real - target),
                                     pair.kappa.real))
