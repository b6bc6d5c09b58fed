"""Business logic for the validation suites: element matrices, Bessel
identities, Herglotz and Tikhonov properties, and cross-validations
of the finite element solvers against series oracles.

"""
import dataclasses
import logging
import math
import pathlib
import time
import typing

import numpy as np

from cloaksim.business.base import Interactor
from cloaksim.business.base import InteractorError
from cloaksim.entities import CavityCondition
from cloaksim.entities import ScatterMode
from cloaksim.fem import FieldInterpolator
from cloaksim.fem import Form
from cloaksim.fem import assemble
from cloaksim.fem import build_dofmap
from cloaksim.fem import element_matrices
from cloaksim.geometry import GeometrySpec
from cloaksim.geometry import RegionTag
from cloaksim.geometry import Shape
from cloaksim.geometry import generate_mesh
from cloaksim.herglotz import HerglotzKernel
from cloaksim.herglotz import build_collocation
from cloaksim.herglotz import direction_quadrature
from cloaksim.herglotz import evaluate
from cloaksim.herglotz import gradient
from cloaksim.herglotz import plane_wave_kernel
from cloaksim.herglotz import solve_kernel
from cloaksim.ite import assemble_blocks
from cloaksim.ite import solve_near
from cloaksim.oracles import BesselKind
from cloaksim.oracles import MieKind
from cloaksim.oracles import RadialProblem
from cloaksim.oracles import bessel_sequence
from cloaksim.oracles import mie_series
from cloaksim.oracles import radial_ite_roots
from cloaksim.reports import write_validation
from cloaksim.scatter import MediumSpec
from cloaksim.scatter import PmlConfig
from cloaksim.scatter import assemble_scatter
from cloaksim.scatter import solve_scatter

_logger = logging.getLogger(__name__)

VALIDATION_FILE_NAME: typing.Final[str] = 'validation.csv'

_CIRCLE_GEOMETRY: typing.Final[GeometrySpec] = GeometrySpec(
    Shape.circle(1.0), Shape.circle(0.5))

_TABLE1_REFERENCE: typing.Final[float] = 0.3538
"""Limit of the smallest Dirichlet eigenvalue pair of the circle."""


class ValidationInteractorError(InteractorError):
    """Exception class for all validation interactor errors.

    """
    pass


@dataclasses.dataclass(frozen=True)
class ValidationCheck:
    """Outcome of a single validation check.

    Attributes
    ----------
    name : str
        The check name.
    passed : bool
        True if the measured value satisfies the threshold.
    value : float
        The measured error (or margin).
    threshold : float
        The accepted bound.
    seconds : float
        The wall-clock time of the check.

    """
    name: str
    passed: bool
    value: float
    threshold: float
    seconds: float


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    checks: typing.List[ValidationCheck]
    path: typing.Optional[pathlib.Path]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> typing.List[str]:
        return [check.name for check in self.checks if not check.passed]


class ValidationInteractor(Interactor):
    """Interactor for running the validation suites.

    """
    def __init__(self, mass_perturbation: float = 0.0):
        """Construct a validation interactor.

        Parameters
        ----------
        mass_perturbation : float
            The relative perturbation injected into the mass matrices
            under test (0 for regular runs).

        """
        self.__mass_perturbation = mass_perturbation

    @classmethod
    def get_error_class(cls) -> type[InteractorError]:
        # Docstring inherited
        return ValidationInteractorError

    def quick_checks(
            self
    ) -> typing.List[typing.Tuple[str, typing.Callable[[], float], float]]:
        """The sub-second checks as (name, measure, threshold) triples."""
        return [
            ('element_matrices_p1', self.__element_matrices_p1, 1e-13),
            ('element_matrices_p2', self.__element_matrices_p2, 1e-13),
            ('mesh_region_areas', self.__mesh_region_areas, 5.0),
            ('global_mass', self.__global_mass, 1e-12),
            ('galerkin_symmetry', self.__galerkin_symmetry, 1e-13),
            ('bessel_wronskian', self.__bessel_wronskian, 1e-9),
            ('bessel_recurrence', self.__bessel_recurrence, 1e-9),
            ('herglotz_gradient', self.__herglotz_gradient, 1e-6),
            ('tikhonov_optimality', self.__tikhonov_optimality, 1e-12),
            ('herglotz_plane_wave', self.__herglotz_plane_wave, 1e-8)
        ]

    def slow_checks(
            self
    ) -> typing.List[typing.Tuple[str, typing.Callable[[], float], float]]:
        """The solver cross-validations as (name, measure, threshold)
        triples.

        """
        return [
            ('radial_oracle', self.__radial_oracle, 5e-3),
            ('table1_oracle', self.__table1_oracle, 1e-2),
            ('eigen_residuals', self.__eigen_residuals, 1e-8),
            ('mie_sound_soft', self.__mie_sound_soft, 2e-2),
            ('mie_penetrable', self.__mie_penetrable, 2e-2)
        ]

    def run(self, quick: bool = False,
            output_directory: typing.Optional[pathlib.Path] = None) \
            -> ValidationReport:
        """Run the validation suites.

        Parameters
        ----------
        quick : bool
            True if only the sub-second checks are run.
        output_directory : pathlib.Path or None
            The directory of the validation report (not written if
            None).

        Returns
        -------
        ValidationReport
            The check outcomes (a check that raises counts as failed).

        Raises
        ------
        ValidationInteractorError
            If the report cannot be written.

        """
        suites = self.quick_checks()
        if not quick:
            suites += self.slow_checks()
        checks = [
            self.__run_check(name, measure, threshold)
            for name, measure, threshold in suites
        ]
        path = None
        if output_directory is not None:
            try:
                path = write_validation(
                    checks, output_directory / VALIDATION_FILE_NAME)
            except Exception:
                raise self._create_error(
                    'unable to write the validation report',
                    directory=str(output_directory))
        report = ValidationReport(checks, path)
        _logger.info('validation finished',
                     extra={
                         'checks': len(checks),
                         'failures': report.failures
                     })
        return report

    def __run_check(self, name: str, measure: typing.Callable[[], float],
                    threshold: float) -> ValidationCheck:
        start = time.perf_counter()
        try:
            value = float(measure())
        except Exception:
            _logger.error('validation check raised', extra={'check': name},
                          exc_info=True)
            value = math.nan
        seconds = time.perf_counter() - start
        passed = bool(value <= threshold)
        if not passed:
            _logger.warning('validation check failed', extra={
                'check': name,
                'value': value,
                'threshold': threshold
            })
        return ValidationCheck(name, passed, value, threshold, seconds)

    def __perturbed(self, mass: typing.Any) -> typing.Any:
        return mass * (1.0 + self.__mass_perturbation)

    def __element_matrices_p1(self) -> float:
        stiffness, mass = element_matrices([[0, 0], [1, 0], [0, 1]])
        expected_stiffness = 0.5 * np.array([[2, -1, -1], [-1, 1, 0],
                                             [-1, 0, 1]])
        expected_mass = (np.ones((3, 3)) + np.eye(3)) / 24.0
        return max(float(np.max(np.abs(stiffness - expected_stiffness))),
                   float(np.max(np.abs(self.__perturbed(mass) -
                                       expected_mass))))

    def __element_matrices_p2(self) -> float:
        stiffness, mass = element_matrices([[0, 0], [2, 0], [0, 1]],
                                           degree=2)
        # Constants lie in the P2 space
        return max(float(np.max(np.abs(stiffness.sum(axis=1)))),
                   abs(float(self.__perturbed(mass).sum()) - 1.0),
                   float(np.max(np.abs(stiffness - stiffness.T))))

    def __mesh_region_areas(self) -> float:
        h = 0.1
        mesh = generate_mesh(_CIRCLE_GEOMETRY, h)
        expected = math.pi * (1.0 - 0.25)
        # Relative error in units of h^2
        return abs(mesh.region_area(RegionTag.SHELL) - expected) / (
            expected * h * h)

    def __global_mass(self) -> float:
        mesh = generate_mesh(_CIRCLE_GEOMETRY, 0.2)
        dofmap = build_dofmap(mesh)
        mass = self.__perturbed(assemble(mesh, dofmap, Form.MASS))
        area = float(np.sum(mesh.signed_areas()))
        return abs(float(np.real(mass.sum())) - area) / area

    def __galerkin_symmetry(self) -> float:
        mesh = generate_mesh(_CIRCLE_GEOMETRY, 0.2)
        dofmap = build_dofmap(mesh, degree=2)
        errors = []
        for form in Form:
            matrix = assemble(mesh, dofmap, form, coeff={
                RegionTag.SHELL: 16.0,
                RegionTag.LOSSY: 1.0
            })
            scale = max(float(abs(matrix).max()), np.finfo(float).tiny)
            errors.append(float(abs(matrix - matrix.T).max()) / scale)
        return max(errors)

    def __bessel_wronskian(self) -> float:
        error = 0.0
        for x in np.linspace(0.5, 50.0, 100):
            j = bessel_sequence(BesselKind.J, 11, float(x))
            y = bessel_sequence(BesselKind.Y, 11, float(x))
            expected = 2.0 / (math.pi * x)
            wronskian = j[1:] * y[:-1] - j[:-1] * y[1:]
            error = max(error,
                        float(np.max(np.abs(wronskian - expected))) /
                        expected)
        return error

    def __bessel_recurrence(self) -> float:
        error = 0.0
        for x in np.linspace(0.5, 50.0, 100):
            j = bessel_sequence(BesselKind.J, 11, float(x))
            orders = np.arange(1, 11)
            left = j[orders - 1] + j[orders + 1]
            right = 2.0 * orders / x * j[orders]
            scale = np.maximum.reduce(
                [np.abs(j[orders - 1]),
                 np.abs(j[orders + 1]),
                 np.abs(right)])
            error = max(error, float(np.max(np.abs(left - right) / scale)))
        return error

    def __herglotz_gradient(self) -> float:
        rng = np.random.default_rng(1)
        quadrature = direction_quadrature(16)
        kernel = HerglotzKernel(
            quadrature,
            rng.standard_normal(16) + 1j * rng.standard_normal(16), 2.0)
        points = rng.uniform(-1.0, 1.0, (20, 2))
        step = 1e-5
        differences = np.column_stack([
            (evaluate(kernel, points + step * unit) -
             evaluate(kernel, points - step * unit)) / (2.0 * step)
            for unit in np.eye(2)
        ])
        exact = gradient(kernel, points)
        return float(np.max(np.abs(differences - exact)) /
                     np.max(np.abs(exact)))

    def __tikhonov_optimality(self) -> float:
        rng = np.random.default_rng(2)
        quadrature = direction_quadrature(16)
        points = rng.uniform(-1.0, 1.0, (40, 2))
        matrix = build_collocation(points, quadrature, 3.0)
        samples = rng.standard_normal(40) + 1j * rng.standard_normal(40)
        regularizer = 1e-3
        kernel = solve_kernel(matrix, samples, regularizer, quadrature, 3.0)

        def functional(g: np.ndarray) -> float:
            return float(
                np.linalg.norm(matrix @ g - samples)**2 +
                regularizer * np.linalg.norm(g)**2)

        optimum = functional(kernel.g)
        scale = 1e-3 * np.linalg.norm(kernel.g)
        decrease = 0.0
        for _ in range(20):
            direction = (rng.standard_normal(16) +
                         1j * rng.standard_normal(16))
            perturbed = functional(kernel.g + scale * direction /
                                   np.linalg.norm(direction))
            decrease = max(decrease, (optimum - perturbed) / optimum)
        return decrease

    def __herglotz_plane_wave(self) -> float:
        kappa = 2.0
        quadrature = direction_quadrature(16)
        points = np.random.default_rng(3).uniform(-20.0, 20.0, (64, 2))
        samples = np.exp(1j * kappa * points @ quadrature.directions[0])
        kernel = solve_kernel(build_collocation(points, quadrature, kappa),
                              samples, 1e-12, quadrature, kappa)
        return kernel.fit_residual

    def __radial_oracle(self) -> float:
        problem = RadialProblem(16.0, 0.5, 1.0, CavityCondition.DIRICHLET)
        roots = radial_ite_roots(problem, 0.2, 0.8)
        if len(roots) < 3:
            return math.inf
        return abs(roots[0].kappa - _TABLE1_REFERENCE) / _TABLE1_REFERENCE

    def __table1_oracle(self) -> float:
        problem = RadialProblem(16.0, 0.5, 1.0, CavityCondition.DIRICHLET)
        oracle = np.array(
            [root.kappa for root in radial_ite_roots(problem, 0.2, 0.9)])
        errors = [
            float(np.min(np.abs(oracle - pair.kappa.real))) /
            pair.kappa.real for pair in self.__table1_pairs()
        ]
        return max(errors)

    def __eigen_residuals(self) -> float:
        return max(pair.residual for pair in self.__table1_pairs())

    def __table1_pairs(self) -> typing.List[typing.Any]:
        mesh = generate_mesh(_CIRCLE_GEOMETRY, 0.1)
        dofmap = build_dofmap(mesh)
        system = assemble_blocks(mesh, dofmap, 16.0)
        if self.__mass_perturbation != 0.0:
            system = dataclasses.replace(system,
                                         b=self.__perturbed(system.b))
        return solve_near(system, 1.0, 5)

    def __disc_error(self, geometry: GeometrySpec, mode: ScatterMode,
                     medium: MediumSpec, kappa: float, radius: float,
                     kind: MieKind, index: typing.Optional[float]) -> float:
        mesh = generate_mesh(geometry, 0.05, include_exterior=True,
                             keep_cavity=not mode.is_idealized)
        dofmap = build_dofmap(mesh)
        kernel = plane_wave_kernel(kappa)
        system = assemble_scatter(mesh, dofmap, medium, kappa,
                                  PmlConfig(geometry.box_halfwidth,
                                            geometry.pml_thickness), kernel)
        solution = solve_scatter(system)
        angles = 2.0 * math.pi * np.arange(360) / 360
        circle = solution.evaluation_radius * np.column_stack(
            (np.cos(angles), np.sin(angles)))
        computed = FieldInterpolator(dofmap).evaluate(solution.scattered,
                                                      circle)
        expected = mie_series(kappa, radius, circle, kind, index=index)
        return float(
            np.linalg.norm(computed - expected) / np.linalg.norm(expected))

    def __mie_sound_soft(self) -> float:
        mode = ScatterMode.IDEALIZED_DIRICHLET
        return self.__disc_error(_CIRCLE_GEOMETRY, mode,
                                 MediumSpec.create(mode, 1.0), 3.0, 0.5,
                                 MieKind.SOUND_SOFT, None)

    def __mie_penetrable(self) -> float:
        mode = ScatterMode.PENETRABLE
        return self.__disc_error(_CIRCLE_GEOMETRY, mode,
                                 MediumSpec.create(mode, 16.0), 1.0, 1.0,
                                 MieKind.PENETRABLE, 16.0)
