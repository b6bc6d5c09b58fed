"""Module for the scattering of Herglotz incident fields by the cloaked
object, discretized by finite elements with a perfectly matched layer.

The scattered field u^s solves div(sigma grad(u^s + u^i)) + kappa^2 n
(u^s + u^i) = 0 in the physical box, complex-stretched in the PML
collar, with u^s = 0 on the outer box boundary.

"""
import dataclasses
import logging
import math
import typing

import numpy as np
import numpy.typing as npt
import scipy.sparse  # type: ignore
import scipy.sparse.linalg  # type: ignore

from cloaksim.entities import ScatterMode
from cloaksim.exceptions import CloakSimError
from cloaksim.fem import DofMap
from cloaksim.fem import FieldInterpolator
from cloaksim.fem import Form
from cloaksim.fem import assemble
from cloaksim.fem import assemble_boundary_load
from cloaksim.fem import assemble_load
from cloaksim.fem import quadrature_points
from cloaksim.fem import triangle_quadrature
from cloaksim.geometry import CAVITY_REGIONS
from cloaksim.geometry import BoundaryTag
from cloaksim.geometry import Mesh
from cloaksim.geometry import RegionTag
from cloaksim.herglotz import HerglotzKernel
from cloaksim.herglotz import evaluate
from cloaksim.herglotz import gradient

_logger = logging.getLogger(__name__)

DEFAULT_EVALUATION_RADIUS: typing.Final[float] = 1.8

DEFAULT_RATIO_POINTS: typing.Final[int] = 720

_SOLVE_RESIDUAL_TOLERANCE: typing.Final[float] = 1e-10

_FLUX_RING_WIDTH: typing.Final[float] = 0.2
"""Half-width of the cutoff ring used to measure the energy flux."""

Coefficients = typing.Tuple[complex, complex]
"""Type of a region's (sigma, n) coefficient pair."""


class ScatterError(CloakSimError):
    """Exception class for all scattering errors.

    """
    pass


class SingularSystemError(ScatterError):
    """Exception to be raised if the scattering system cannot be
    factorized.

    """
    def __init__(self, **kwargs: typing.Any):
        # Docstring inherited
        super().__init__('scattering system is singular', **kwargs)


@dataclasses.dataclass(frozen=True)
class PmlConfig:
    """Perfectly matched layer settings.

    Attributes
    ----------
    box_halfwidth : float
        The half-width L of the physical box.
    thickness : float
        The thickness d of the PML collar.
    exponent : int
        The polynomial grading exponent m.
    reflection : float
        The target reflection coefficient R0.

    """
    box_halfwidth: float = 2.2
    thickness: float = 0.6
    exponent: int = 3
    reflection: float = math.exp(-16.0)

    def __post_init__(self) -> None:
        if not (self.box_halfwidth > 0 and self.thickness > 0
                and self.exponent >= 0 and 0 < self.reflection < 1):
            raise ScatterError('invalid PML settings', pml=self)

    @property
    def sigma_max(self) -> float:
        return (-(self.exponent + 1) * math.log(self.reflection) /
                (2.0 * self.thickness))


def pml_stretch(points: npt.ArrayLike, pml: PmlConfig,
                kappa: float) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Evaluate the complex stretch factors S_1 and S_2 at points.

    Returns
    -------
    tuple of np.ndarray
        The stretch factors 1 + i sigma_j(x_j) / kappa with the graded
        absorption sigma_j = sigma_max (l_j / d)^m of the PML depth l_j.
        Outgoing waves exp(i kappa r) decay in the layer.

    """
    points = np.asarray(points, dtype=float)
    depth = np.maximum(np.abs(points) - pml.box_halfwidth, 0.0)
    absorption = pml.sigma_max * (depth / pml.thickness)**pml.exponent
    stretch = 1.0 + 1j * absorption / kappa
    return stretch[..., 0], stretch[..., 1]


@dataclasses.dataclass(frozen=True)
class MediumSpec:
    """Piecewise constant coefficients of the scattering medium.

    Attributes
    ----------
    mode : ScatterMode
        The scattering problem variant.
    regions : dict
        The (sigma, n) coefficient pairs by region (the PML uses the
        exterior coefficients). Idealized modes have no cavity entries.

    """
    mode: ScatterMode
    regions: typing.Mapping[RegionTag, Coefficients]

    def __post_init__(self) -> None:
        if self.regions.get(RegionTag.EXTERIOR) != (1.0, 1.0):
            raise ScatterError('exterior must have unit coefficients')
        if RegionTag.SHELL not in self.regions:
            raise ScatterError('missing shell coefficients')
        if self.regions[RegionTag.SHELL][0] != 1.0:
            raise ScatterError('shell must have unit sigma')
        for region, (sigma, n) in self.regions.items():
            if not (complex(sigma).real > 0 and complex(n).real > 0
                    and complex(n).imag >= 0):
                raise ScatterError('invalid region coefficients',
                                   region=region.keyword, sigma=sigma, n=n)
        has_cavity = any(region in self.regions for region in CAVITY_REGIONS)
        if self.mode.is_idealized == has_cavity:
            raise ScatterError('cavity coefficients do not match the mode',
                               mode=self.mode.value)

    @staticmethod
    def create(mode: ScatterMode, n_c: float, gamma: float = 1.0,
               tau: float = 0.01, alpha: float = 1.0, beta: float = 0.3,
               sigma_core: float = 1.0, n_core: float = 12.0,
               cavity: typing.Optional[Coefficients] = None) -> 'MediumSpec':
        """Create the medium of a scattering mode.

        Parameters
        ----------
        mode : ScatterMode
            The scattering problem variant.
        n_c : float
            The refractive index of the shell.
        gamma, tau, alpha, beta : float
            The lossy layer parameters: LOSSY1 uses sigma = gamma /
            tau^2 and n = alpha + i beta / tau^2, LOSSY2 uses
            sigma = gamma tau^2 and n = (alpha + i beta) tau^2.
        sigma_core, n_core : float
            The coefficients of the core.
        cavity : tuple or None
            The (sigma, n) coefficients of the cavity for the
            PENETRABLE mode (the shell coefficients if None).

        """
        regions: typing.Dict[RegionTag, Coefficients] = {
            RegionTag.EXTERIOR: (1.0, 1.0),
            RegionTag.PML: (1.0, 1.0),
            RegionTag.SHELL: (1.0, n_c)
        }
        if mode is ScatterMode.LOSSY1:
            regions[RegionTag.LOSSY] = (gamma / tau**2,
                                        complex(alpha, beta / tau**2))
        elif mode is ScatterMode.LOSSY2:
            regions[RegionTag.LOSSY] = (gamma * tau**2,
                                        complex(alpha * tau**2,
                                                beta * tau**2))
        elif mode is ScatterMode.PENETRABLE:
            regions[RegionTag.LOSSY] = (
                (1.0, n_c) if cavity is None else cavity)
        if not mode.is_idealized:
            regions[RegionTag.CORE] = (
                regions[RegionTag.LOSSY] if mode is ScatterMode.PENETRABLE
                else (sigma_core, n_core))
        return MediumSpec(mode, regions)

    def coefficients(self, region: RegionTag) -> Coefficients:
        try:
            return self.regions[region]
        except KeyError:
            raise ScatterError('no coefficients for region',
                               region=region.keyword)


@dataclasses.dataclass(frozen=True, eq=False)
class ScatterSystem:
    """Assembled scattering system with eliminated Dirichlet DoFs.

    Attributes
    ----------
    matrix : scipy.sparse.csr_matrix
        The complex system matrix (identity rows for constrained DoFs).
    rhs : np.ndarray
        The right-hand side.
    constrained : np.ndarray
        The DoFs with prescribed values.
    values : np.ndarray
        The prescribed values of the constrained DoFs.
    dofmap : DofMap
        The DoF map.
    medium : MediumSpec
        The medium.
    kappa : float
        The wavenumber.
    pml : PmlConfig
        The PML settings.
    incident : HerglotzKernel
        The incident field.

    """
    matrix: scipy.sparse.csr_matrix
    rhs: np.ndarray
    constrained: np.ndarray
    values: np.ndarray
    dofmap: DofMap
    medium: MediumSpec
    kappa: float
    pml: PmlConfig
    incident: HerglotzKernel


def _check_mesh(mesh: Mesh, medium: MediumSpec) -> None:
    for region in (RegionTag.EXTERIOR, RegionTag.PML):
        if not mesh.has_region(region):
            raise ScatterError('mesh lacks exterior region',
                               region=region.keyword)
    if medium.mode.is_idealized:
        if any(mesh.has_region(region) for region in CAVITY_REGIONS):
            raise ScatterError('idealized modes require a hole in D')
        if not mesh.has_boundary(BoundaryTag.CAVITY):
            raise ScatterError('mesh lacks cavity boundary tags')
        return
    for region in RegionTag:
        if mesh.has_region(region):
            medium.coefficients(region)


def _region_values(medium: MediumSpec, tags: np.ndarray,
                   index: int) -> np.ndarray:
    lookup = {
        int(region): complex(pair[index])
        for region, pair in medium.regions.items()
    }
    return np.array([lookup[tag] for tag in tags.tolist()])


def assemble_scatter(mesh: Mesh, dofmap: DofMap, medium: MediumSpec,
                     kappa: float, pml: PmlConfig,
                     incident: HerglotzKernel) -> ScatterSystem:
    """Assemble the scattering system for the scattered field.

    Raises
    ------
    ScatterError
        If the mesh and the medium do not match, or the incident field
        has a different wavenumber.

    """
    if not kappa > 0:
        raise ScatterError('wavenumber must be positive', kappa=kappa)
    if not math.isclose(incident.kappa, kappa, rel_tol=1e-12):
        raise ScatterError('incident wavenumber mismatch', kappa=kappa,
                           incident_kappa=incident.kappa)
    if dofmap.mesh is not mesh:
        raise ScatterError('DoF map built on a different mesh')
    _check_mesh(mesh, medium)

    def stiffness_coefficient(points: np.ndarray,
                              tags: np.ndarray) -> np.ndarray:
        s1, s2 = pml_stretch(points, pml, kappa)
        sigma = _region_values(medium, tags, 0)[:, np.newaxis]
        return np.stack((sigma * s2 / s1, sigma * s1 / s2), axis=-1)

    def mass_coefficient(points: np.ndarray, tags: np.ndarray) -> np.ndarray:
        s1, s2 = pml_stretch(points, pml, kappa)
        n = _region_values(medium, tags, 1)[:, np.newaxis]
        return n * s1 * s2

    matrix = (assemble(mesh, dofmap, Form.STIFFNESS,
                       coeff=stiffness_coefficient) -
              kappa**2 * assemble(mesh, dofmap, Form.MASS,
                                  coeff=mass_coefficient)).tocsr()

    def contrast_value(points: np.ndarray, tags: np.ndarray) -> np.ndarray:
        n = _region_values(medium, tags, 1)[:, np.newaxis]
        return kappa**2 * (n - 1.0) * evaluate(incident, points)

    def contrast_flux(points: np.ndarray, tags: np.ndarray) -> np.ndarray:
        sigma = _region_values(medium, tags, 0)[:, np.newaxis, np.newaxis]
        return -(sigma - 1.0) * gradient(incident, points)

    scatterer = [
        region for region in medium.regions
        if region not in (RegionTag.EXTERIOR, RegionTag.PML)
        and mesh.has_region(region)
    ]
    rhs = assemble_load(mesh, dofmap, value=contrast_value,
                        flux=contrast_flux, regions=scatterer)
    constrained = np.empty(0, dtype=np.int64)
    values = np.empty(0, dtype=complex)
    if medium.mode is ScatterMode.IDEALIZED_NEUMANN:
        # Normals point out of the computational domain (into D)
        rhs -= assemble_boundary_load(
            mesh, dofmap, BoundaryTag.CAVITY,
            lambda points, normals: np.einsum(
                '...i,...i->...', gradient(incident, points),
                normals[:, np.newaxis, :]))
    box = dofmap.dofs_on(BoundaryTag.BOX)
    constrained = np.concatenate((constrained, box))
    values = np.concatenate((values, np.zeros(len(box), dtype=complex)))
    if medium.mode is ScatterMode.IDEALIZED_DIRICHLET:
        cavity = dofmap.cavity_boundary
        constrained = np.concatenate((constrained, cavity))
        values = np.concatenate(
            (values, -evaluate(incident, dofmap.coordinates[cavity])))
    matrix, rhs = _eliminate(matrix, rhs, constrained, values)
    _logger.info(
        'scattering system assembled', extra={
            'mode': medium.mode.value,
            'kappa': kappa,
            'dofs': dofmap.dof_count
        })
    return ScatterSystem(matrix, rhs, constrained, values, dofmap, medium,
                         kappa, pml, incident)


def _eliminate(
        matrix: scipy.sparse.csr_matrix, rhs: np.ndarray,
        constrained: np.ndarray, values: np.ndarray
) -> typing.Tuple[scipy.sparse.csr_matrix, np.ndarray]:
    # Symmetric elimination: constrained columns move to the right-hand
    # side and constrained rows become identity rows
    size = matrix.shape[0]
    lifted = np.zeros(size, dtype=complex)
    lifted[constrained] = values
    rhs = rhs - matrix @ lifted
    keep = np.ones(size)
    keep[constrained] = 0.0
    mask = scipy.sparse.diags(keep)
    identity = scipy.sparse.diags(1.0 - keep)
    matrix = (mask @ matrix @ mask + identity).tocsr()
    matrix.eliminate_zeros()
    rhs[constrained] = values
    return matrix, rhs


@dataclasses.dataclass(frozen=True, eq=False)
class ScatterSolution:
    """Solution of a scattering problem.

    Attributes
    ----------
    system : ScatterSystem
        The solved system.
    scattered : np.ndarray
        The DoF values of the scattered field.
    incident_values : np.ndarray
        The DoF values of the incident field interpolant.
    residual : float
        The relative residual of the linear solve.
    ratio : float
        The scattering ratio ||u^s|| / ||u^i|| on the evaluation circle.
    evaluation_radius : float
        The radius of the evaluation circle.

    """
    system: ScatterSystem
    scattered: np.ndarray
    incident_values: np.ndarray
    residual: float
    ratio: float
    evaluation_radius: float

    @property
    def total(self) -> np.ndarray:
        return self.scattered + self.incident_values


def solve_scatter(system: ScatterSystem,
                  evaluation_radius: float = DEFAULT_EVALUATION_RADIUS,
                  ratio_points: int = DEFAULT_RATIO_POINTS) -> ScatterSolution:
    """Solve a scattering system and compute the scattering ratio.

    Raises
    ------
    SingularSystemError
        If the system matrix cannot be factorized.
    ScatterError
        If the evaluation circle leaves the physical box.

    """
    if not 0 < evaluation_radius < system.pml.box_halfwidth:
        raise ScatterError('evaluation circle outside the physical box',
                           evaluation_radius=evaluation_radius)
    try:
        factorization = scipy.sparse.linalg.splu(system.matrix.tocsc())
    except RuntimeError as error:
        raise SingularSystemError(kappa=system.kappa,
                                  mode=system.medium.mode.value) from error
    scattered = factorization.solve(system.rhs)
    rhs_norm = max(float(np.linalg.norm(system.rhs)), np.finfo(float).tiny)
    residual = float(
        np.linalg.norm(system.matrix @ scattered - system.rhs) / rhs_norm)
    if residual > _SOLVE_RESIDUAL_TOLERANCE:
        scattered += factorization.solve(system.rhs -
                                         system.matrix @ scattered)
        residual = float(
            np.linalg.norm(system.matrix @ scattered - system.rhs) /
            rhs_norm)
        if residual > _SOLVE_RESIDUAL_TOLERANCE:
            _logger.warning('scattering solve residual above tolerance',
                            extra={'residual': residual})
    scattered[system.constrained] = system.values
    incident_values = evaluate(system.incident, system.dofmap.coordinates)
    angles = 2.0 * math.pi * np.arange(ratio_points) / ratio_points
    circle = evaluation_radius * np.column_stack(
        (np.cos(angles), np.sin(angles)))
    interpolator = FieldInterpolator(system.dofmap)
    scattered_circle = interpolator.evaluate(scattered, circle)
    incident_circle = interpolator.evaluate(incident_values, circle)
    if np.any(np.isnan(scattered_circle)):
        raise ScatterError('evaluation circle leaves the mesh',
                           evaluation_radius=evaluation_radius)
    incident_norm = float(np.linalg.norm(incident_circle))
    if incident_norm == 0.0:
        raise ScatterError('incident field vanishes on the evaluation circle')
    ratio = float(np.linalg.norm(scattered_circle)) / incident_norm
    _logger.info(
        'scattering problem solved', extra={
            'mode': system.medium.mode.value,
            'kappa': system.kappa,
            'ratio': ratio,
            'residual': residual
        })
    return ScatterSolution(system, scattered, incident_values, residual,
                           ratio, evaluation_radius)


def scattering_ratio(solution: ScatterSolution) -> float:
    """The ratio ||u^s|| / ||u^i|| on the evaluation circle."""
    return solution.ratio


def lossy_layer_norm(solution: ScatterSolution) -> float:
    """The L2 norm of the total field in the lossy layer (energy
    absorption diagnostic; NaN for idealized modes).

    """
    dofmap = solution.system.dofmap
    if not dofmap.mesh.has_region(RegionTag.LOSSY):
        return math.nan
    mass = assemble(dofmap.mesh, dofmap, Form.MASS,
                    regions=[RegionTag.LOSSY])
    total = solution.total
    return math.sqrt(max(float(np.real(np.vdot(total, mass @ total))), 0.0))


def energy_flux(solution: ScatterSolution,
                radius: typing.Optional[float] = None) -> float:
    """Measure the net energy flux Im(conj(u) du/dnu) of the total field
    through circles around the scatterer.

    The flux is averaged over a ring of radii around the given radius by
    integrating the current against the gradient of a smooth radial
    cutoff, which is accurate for fields satisfying the Helmholtz
    equation in the ring.

    """
    radius = solution.evaluation_radius if radius is None else radius
    dofmap = solution.system.dofmap
    mesh = dofmap.mesh
    inner, outer = radius - _FLUX_RING_WIDTH, radius + _FLUX_RING_WIDTH
    if not (inner > 0 and outer < solution.system.pml.box_halfwidth):
        raise ScatterError('flux ring outside the physical box',
                           radius=radius)
    centroids = mesh.centroids
    distance = np.hypot(centroids[:, 0], centroids[:, 1])
    near_ring = np.flatnonzero((distance > inner - 2.0 * mesh.h)
                               & (distance < outer + 2.0 * mesh.h))
    barycentric, weights = triangle_quadrature(4)
    points = quadrature_points(mesh, near_ring, barycentric).reshape(-1, 2)
    point_weights = (mesh.signed_areas()[near_ring, np.newaxis] *
                     weights).ravel()
    r = np.hypot(points[:, 0], points[:, 1])
    width = outer - inner
    # Cutoff chi = cos^2(pi (r - inner) / (2 width)) across the ring
    slope = np.where((r > inner) & (r < outer),
                     -0.5 * math.pi / width * np.sin(math.pi *
                                                     (r - inner) / width),
                     0.0)
    interpolator = FieldInterpolator(dofmap)
    total = solution.total
    values = interpolator.evaluate(total, points)
    gradients = interpolator.gradient(total, points)
    radial_current = np.imag(
        np.conj(values) * np.einsum('pi,pi->p', gradients, points) / r)
    return float(-np.sum(point_weights * slope * radial_current))


@dataclasses.dataclass(frozen=True)
class FieldSample:
    """Field values at a sample point.

    Attributes
    ----------
    x, y : float
        The coordinates.
    scattered : complex or None
        The scattered field u^s (None at masked points).
    incident : complex or None
        The incident field u^i (None at masked points).

    """
    x: float
    y: float
    scattered: typing.Optional[complex]
    incident: typing.Optional[complex]

    @property
    def masked(self) -> bool:
        """True if the point lies outside the meshed region (inside an
        impenetrable cavity), where the fields are undefined.

        """
        return self.scattered is None or self.incident is None

    @property
    def total(self) -> typing.Optional[complex]:
        if self.scattered is None or self.incident is None:
            return None
        return self.scattered + self.incident


def export_fields(solution: ScatterSolution,
                  points: npt.ArrayLike) -> typing.List[FieldSample]:
    """Sample the scattered, incident and total fields at points of the
    physical box.

    Raises
    ------
    ScatterError
        If a point lies outside the physical box.

    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    box_halfwidth = solution.system.pml.box_halfwidth
    if np.any(np.abs(points) > box_halfwidth * (1.0 + 1e-12)):
        raise ScatterError('sample point outside the physical box',
                           box_halfwidth=box_halfwidth)
    interpolator = FieldInterpolator(solution.system.dofmap)
    scattered = interpolator.evaluate(solution.scattered, points)
    incident = evaluate(solution.system.incident, points)
    masked = np.isnan(scattered)
    samples = []
    for (x, y), u_s, u_i, is_masked in zip(points.tolist(), scattered,
                                           incident, masked):
        if is_masked:
            samples.append(FieldSample(x, y, None, None))
        else:
            samples.append(FieldSample(x, y, complex(u_s), complex(u_i)))
    return samples


def grid_points(box_halfwidth: float, count: int) -> np.ndarray:
    """Tensor grid of count x count points covering the physical box."""
    axis = np.linspace(-box_halfwidth, box_halfwidth, count)
    x, y = np.meshgrid(axis, axis)
    return np.column_stack((x.ravel(), y.ravel()))
