"""Module for Lagrange finite elements of degree 1 and 2 on triangular
meshes: DoF maps, element matrices and sparse assembly.

"""
import collections.abc
import dataclasses
import enum
import functools
import logging
import numbers
import typing

import numpy as np
import numpy.typing as npt
import scipy.sparse  # type: ignore

from cloaksim.entities import CavityCondition
from cloaksim.exceptions import CloakSimError
from cloaksim.geometry import CAVITY_REGIONS
from cloaksim.geometry import BoundaryTag
from cloaksim.geometry import Mesh
from cloaksim.geometry import RegionTag

_logger = logging.getLogger(__name__)

SUPPORTED_DEGREES: typing.Final[tuple[int, ...]] = (1, 2)
"""Supported polynomial degrees of the Lagrange elements."""

_DUNAVANT_A: typing.Final[float] = 0.445948490915965
_DUNAVANT_B: typing.Final[float] = 0.091576213509771
_DUNAVANT_WEIGHT_A: typing.Final[float] = 0.223381589678011
_DUNAVANT_WEIGHT_B: typing.Final[float] = 0.109951743655322

_TRIANGLE_RULES: typing.Final[dict[int, tuple[np.ndarray, np.ndarray]]] = {
    2: (np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6],
                  [1 / 6, 1 / 6, 2 / 3]]), np.full(3, 1 / 3)),
    4: (np.array([[1 - 2 * _DUNAVANT_A, _DUNAVANT_A, _DUNAVANT_A],
                  [_DUNAVANT_A, 1 - 2 * _DUNAVANT_A, _DUNAVANT_A],
                  [_DUNAVANT_A, _DUNAVANT_A, 1 - 2 * _DUNAVANT_A],
                  [1 - 2 * _DUNAVANT_B, _DUNAVANT_B, _DUNAVANT_B],
                  [_DUNAVANT_B, 1 - 2 * _DUNAVANT_B, _DUNAVANT_B],
                  [_DUNAVANT_B, _DUNAVANT_B, 1 - 2 * _DUNAVANT_B]]),
        np.array([_DUNAVANT_WEIGHT_A] * 3 + [_DUNAVANT_WEIGHT_B] * 3))
}
"""Symmetric triangle quadrature rules (barycentric points, weights
summing to one) by polynomial degree of exactness."""

_BARYCENTRIC_GRADIENTS: typing.Final[np.ndarray] = np.array([[-1.0, -1.0],
                                                            [1.0, 0.0],
                                                            [0.0, 1.0]])
"""Gradients of the barycentric coordinates on the reference triangle."""

_LOCAL_EDGES: typing.Final[tuple[tuple[int, int], ...]] = ((0, 1), (1, 2),
                                                           (2, 0))
"""Vertex pairs of the local edges (and P2 midpoint DoFs) of a triangle."""

Coefficient = typing.Union[complex, typing.Mapping[RegionTag, complex],
                           typing.Callable[[np.ndarray, np.ndarray],
                                           npt.ArrayLike]]
"""Type of an assembly coefficient.

A coefficient is a constant, a piecewise constant per region tag, or a
callable evaluated at the (T, Q, 2) quadrature points of the (T,)
triangle region tags. For stiffness forms, a callable may return (T, Q,
2) values of a diagonal anisotropic coefficient.

"""


class FemError(CloakSimError):
    """Exception class for all finite element errors.

    """
    pass


class Form(enum.Enum):
    """Enumeration of the bilinear forms.

    """
    STIFFNESS = 'stiffness'
    MASS = 'mass'


def triangle_quadrature(degree: int) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Get a symmetric triangle quadrature rule.

    Parameters
    ----------
    degree : int
        The polynomial degree to be integrated exactly (at most 4).

    Returns
    -------
    tuple of np.ndarray
        The (Q, 3) barycentric quadrature points and the (Q,) weights
        (summing to one, to be multiplied by the triangle area).

    """
    for rule_degree in sorted(_TRIANGLE_RULES):
        if degree <= rule_degree:
            return _TRIANGLE_RULES[rule_degree]
    raise FemError('no quadrature rule available', degree=degree)


def shape_functions(
        degree: int,
        barycentric: npt.ArrayLike) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Evaluate the reference shape functions.

    Parameters
    ----------
    degree : int
        The polynomial degree (1 or 2).
    barycentric : array_like
        The (Q, 3) barycentric coordinates of the evaluation points.

    Returns
    -------
    tuple of np.ndarray
        The (Q, B) shape function values and the (Q, B, 2) gradients
        with respect to the reference coordinates. P2 shape functions are
        ordered as the three vertices followed by the midpoints of the
        local edges (0, 1), (1, 2) and (2, 0).

    """
    lam = np.asarray(barycentric, dtype=float).reshape(-1, 3)
    grad = _BARYCENTRIC_GRADIENTS
    if degree == 1:
        values = lam
        gradients = np.broadcast_to(grad, (len(lam), 3, 2))
        return values, np.array(gradients)
    if degree != 2:
        raise FemError('unsupported polynomial degree', degree=degree)
    vertex_values = lam * (2.0 * lam - 1.0)
    vertex_gradients = (4.0 * lam - 1.0)[:, :, np.newaxis] * grad
    edge_values = []
    edge_gradients = []
    for i, j in _LOCAL_EDGES:
        edge_values.append(4.0 * lam[:, i] * lam[:, j])
        edge_gradients.append(4.0 * (lam[:, j, np.newaxis] * grad[i] +
                                     lam[:, i, np.newaxis] * grad[j]))
    values = np.column_stack([vertex_values] + edge_values)
    gradients = np.concatenate(
        [vertex_gradients, np.stack(edge_gradients, axis=1)], axis=1)
    return values, gradients


def _jacobians(corners: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
    jacobians = np.stack(
        (corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]), axis=2)
    determinants = np.linalg.det(jacobians)
    scale = np.max(np.abs(jacobians), axis=(1, 2))**2
    if np.any(np.abs(determinants) <= 1e-14 * scale):
        raise FemError('degenerate triangle with zero area')
    return jacobians, determinants


def _local_matrices(corners: np.ndarray, degree: int, form: Form,
                    weights: np.ndarray) -> np.ndarray:
    # weights: (T, Q) for mass forms, (T, Q, 2) for stiffness forms
    jacobians, determinants = _jacobians(corners)
    points, rule_weights = triangle_quadrature(2 * degree)
    values, reference_gradients = shape_functions(degree, points)
    areas = 0.5 * np.abs(determinants)
    scaled = weights * (areas[:, np.newaxis] *
                        rule_weights[np.newaxis, :]).reshape(
                            weights.shape[:2] + (1, ) *
                            (weights.ndim - 2))
    if form is Form.MASS:
        return np.einsum('tq,qa,qb->tab', scaled, values, values)
    inverse_transposed = np.linalg.inv(jacobians).transpose(0, 2, 1)
    gradients = np.einsum('tij,qbj->tqbi', inverse_transposed,
                          reference_gradients)
    return np.einsum('tqi,tqai,tqbi->tab', scaled, gradients, gradients)


def element_matrices(vertices: npt.ArrayLike, degree: int = 1,
                     coeff: complex = 1.0,
                     stiffness_coeff: complex = 1.0) \
        -> typing.Tuple[np.ndarray, np.ndarray]:
    """Compute the element stiffness and mass matrices of a triangle.

    Parameters
    ----------
    vertices : array_like
        The (3, 2) counter-clockwise vertex coordinates.
    degree : int
        The polynomial degree (1 or 2).
    coeff : complex
        The coefficient multiplying the mass matrix.
    stiffness_coeff : complex
        The coefficient multiplying the stiffness matrix.

    Returns
    -------
    tuple of np.ndarray
        The local stiffness and mass matrices.

    Raises
    ------
    FemError
        If the triangle is degenerate or the degree is unsupported.

    """
    if degree not in SUPPORTED_DEGREES:
        raise FemError('unsupported polynomial degree', degree=degree)
    corners = np.asarray(vertices, dtype=float).reshape(1, 3, 2)
    quadrature_count = len(triangle_quadrature(2 * degree)[1])
    mass_weights = np.full((1, quadrature_count), coeff)
    stiffness_weights = np.full((1, quadrature_count, 2), stiffness_coeff)
    stiffness = _local_matrices(corners, degree, Form.STIFFNESS,
                                stiffness_weights)[0]
    mass = _local_matrices(corners, degree, Form.MASS, mass_weights)[0]
    return stiffness, mass


@dataclasses.dataclass(frozen=True, eq=False)
class DofMap:
    """Global degrees of freedom of a Lagrange space on a mesh.

    Attributes
    ----------
    mesh : Mesh
        The underlying mesh.
    degree : int
        The polynomial degree.
    cavity_condition : CavityCondition
        The cavity condition selecting the v-space.
    coordinates : np.ndarray
        The (N_h, 2) coordinates of the DoFs (P2 midpoint DoFs lie on
        the straight edges).
    element_dofs : np.ndarray
        The (T, B) global DoFs of every triangle.
    boundary : np.ndarray
        The DoFs on the outer boundary (S_h^B).
    interior : np.ndarray
        The DoFs not on the outer boundary (S_h^0).
    cavity_boundary : np.ndarray
        The DoFs on the cavity boundary.
    cavity_interior : np.ndarray
        The DoFs strictly inside Omega minus the closure of D (S_h^D).
    v_space : np.ndarray
        The interior DoFs of the v-unknown: S_h^D for Dirichlet cavity
        conditions, additionally the cavity boundary DoFs for Neumann
        cavity conditions.

    """
    mesh: Mesh
    degree: int
    cavity_condition: CavityCondition
    coordinates: np.ndarray
    element_dofs: np.ndarray
    boundary: np.ndarray
    interior: np.ndarray
    cavity_boundary: np.ndarray
    cavity_interior: np.ndarray
    v_space: np.ndarray

    @property
    def dof_count(self) -> int:
        return len(self.coordinates)

    @property
    def all(self) -> np.ndarray:
        return np.arange(self.dof_count)

    def dofs_on(self, tag: BoundaryTag) -> np.ndarray:
        """DoFs lying on the edges with the given boundary tag."""
        edges = self.mesh.edges_with(tag)
        dofs = [edges.ravel()]
        if self.degree == 2 and len(edges) > 0:
            dofs.append(self.mesh.node_count + self.mesh.edge_indices(edges))
        return np.unique(np.concatenate(dofs)).astype(np.int64)

    def dofs_in(self, *regions: RegionTag) -> np.ndarray:
        """DoFs of the triangles carrying one of the given tags."""
        return np.unique(self.element_dofs[self.mesh.triangles_in(*regions)])


def build_dofmap(
        mesh: Mesh, degree: int = 1,
        cavity_condition: CavityCondition = CavityCondition.DIRICHLET
) -> DofMap:
    """Build the DoF map of the Lagrange space of the given degree.

    Raises
    ------
    FemError
        If the degree is unsupported or the mesh lacks boundary tags.

    """
    if degree not in SUPPORTED_DEGREES:
        raise FemError('unsupported polynomial degree', degree=degree)
    if not mesh.has_boundary(BoundaryTag.OUTER):
        raise FemError('mesh lacks outer boundary tags')
    has_cavity = any(mesh.has_region(region) for region in CAVITY_REGIONS)
    if has_cavity and not mesh.has_boundary(BoundaryTag.CAVITY):
        raise FemError('mesh lacks cavity boundary tags')
    if degree == 1:
        coordinates = np.array(mesh.nodes)
        element_dofs = np.array(mesh.triangles)
    else:
        edges, triangle_edges = mesh.edge_table
        midpoints = 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])
        coordinates = np.vstack((mesh.nodes, midpoints))
        element_dofs = np.hstack(
            (mesh.triangles, mesh.node_count + triangle_edges))
    dofmap = DofMap(mesh, degree, cavity_condition, coordinates, element_dofs,
                    *(np.empty(0, dtype=np.int64), ) * 5)
    boundary = dofmap.dofs_on(BoundaryTag.OUTER)
    interior = np.setdiff1d(dofmap.all, boundary)
    cavity_boundary = dofmap.dofs_on(BoundaryTag.CAVITY)
    shell = dofmap.dofs_in(RegionTag.SHELL)
    neumann_space = np.setdiff1d(shell, boundary)
    cavity_interior = np.setdiff1d(neumann_space, cavity_boundary)
    v_space = (cavity_interior if cavity_condition is
               CavityCondition.DIRICHLET else neumann_space)
    dofmap = dataclasses.replace(dofmap, boundary=boundary,
                                 interior=interior,
                                 cavity_boundary=cavity_boundary,
                                 cavity_interior=cavity_interior,
                                 v_space=v_space)
    _logger.debug(
        'DoF map built', extra={
            'degree': degree,
            'dofs': dofmap.dof_count,
            'interior_dofs': len(interior),
            'boundary_dofs': len(boundary)
        })
    return dofmap


def _coefficient_values(coeff: Coefficient, points: np.ndarray,
                        tags: np.ndarray, form: Form) -> np.ndarray:
    shape = points.shape[:2]
    if isinstance(coeff, numbers.Number):
        values = np.full(shape, coeff)
    elif isinstance(coeff, collections.abc.Mapping):
        try:
            per_triangle = np.array(
                [coeff[RegionTag(tag)] for tag in tags.tolist()])
        except KeyError as error:
            raise FemError('no coefficient for region',
                           region=str(error)) from error
        values = np.broadcast_to(per_triangle[:, np.newaxis], shape)
    else:
        values = np.asarray(coeff(points, tags))
    if form is Form.STIFFNESS:
        if values.ndim == 2:
            values = values[:, :, np.newaxis]
        return np.broadcast_to(values, shape + (2, ))
    return np.broadcast_to(values, shape)


def _selected_triangles(
        mesh: Mesh,
        regions: typing.Optional[typing.Iterable[RegionTag]]) -> np.ndarray:
    if regions is None:
        return np.arange(mesh.triangle_count)
    triangle_ids = mesh.triangles_in(*regions)
    if len(triangle_ids) == 0:
        raise FemError('region filter selects no triangles',
                       regions=[region.keyword for region in regions])
    return triangle_ids


def quadrature_points(mesh: Mesh, triangle_ids: np.ndarray,
                      barycentric: np.ndarray) -> np.ndarray:
    """Physical (T, Q, 2) coordinates of barycentric points."""
    corners = mesh.nodes[mesh.triangles[triangle_ids]]
    return np.einsum('qa,tai->tqi', barycentric, corners)


def assemble(mesh: Mesh, dofmap: DofMap, form: Form,
             regions: typing.Optional[typing.Iterable[RegionTag]] = None,
             coeff: Coefficient = 1.0) -> scipy.sparse.csr_matrix:
    """Assemble the global matrix of a bilinear form.

    Parameters
    ----------
    mesh : Mesh
        The mesh.
    dofmap : DofMap
        The DoF map built on the mesh.
    form : Form
        The bilinear form.
    regions : iterable of RegionTag or None
        The regions to integrate over (all triangles if None).
    coeff : Coefficient
        The coefficient of the form.

    Returns
    -------
    scipy.sparse.csr_matrix
        The N_h x N_h matrix without explicitly stored zeros.

    Raises
    ------
    FemError
        If the region filter selects no triangles, the DoF map belongs
        to another mesh, or a triangle is degenerate.

    """
    if dofmap.mesh is not mesh:
        raise FemError('DoF map built on a different mesh')
    if regions is not None:
        regions = list(regions)
    triangle_ids = _selected_triangles(mesh, regions)
    points, _ = triangle_quadrature(2 * dofmap.degree)
    physical_points = quadrature_points(mesh, triangle_ids, points)
    weights = _coefficient_values(coeff, physical_points,
                                  mesh.triangle_tags[triangle_ids], form)
    local = _local_matrices(mesh.nodes[mesh.triangles[triangle_ids]],
                            dofmap.degree, form, weights)
    dofs = dofmap.element_dofs[triangle_ids]
    count = dofs.shape[1]
    rows = np.repeat(dofs, count, axis=1).ravel()
    columns = np.tile(dofs, (1, count)).ravel()
    matrix = scipy.sparse.coo_matrix(
        (local.ravel(), (rows, columns)),
        shape=(dofmap.dof_count, dofmap.dof_count)).tocsr()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    return matrix


def assemble_load(
        mesh: Mesh, dofmap: DofMap,
        value: typing.Optional[typing.Callable[[np.ndarray, np.ndarray],
                                               npt.ArrayLike]] = None,
        flux: typing.Optional[typing.Callable[[np.ndarray, np.ndarray],
                                              npt.ArrayLike]] = None,
        regions: typing.Optional[typing.Iterable[RegionTag]] = None
) -> np.ndarray:
    """Assemble the load vector of int(f phi) + int(F . grad(phi)).

    The callables are evaluated at the (T, Q, 2) quadrature points of the
    (T,) triangle region tags and return (T, Q) values of f and (T, Q, 2)
    values of F respectively.

    """
    if regions is not None:
        regions = list(regions)
    triangle_ids = _selected_triangles(mesh, regions)
    points, rule_weights = triangle_quadrature(4)
    physical_points = quadrature_points(mesh, triangle_ids, points)
    tags = mesh.triangle_tags[triangle_ids]
    corners = mesh.nodes[mesh.triangles[triangle_ids]]
    jacobians, determinants = _jacobians(corners)
    scale = 0.5 * np.abs(determinants)[:, np.newaxis] * rule_weights
    values, reference_gradients = shape_functions(dofmap.degree, points)
    local = np.zeros((len(triangle_ids), values.shape[1]), dtype=complex)
    if value is not None:
        f = np.broadcast_to(value(physical_points, tags), scale.shape)
        local += np.einsum('tq,qa->ta', f * scale, values)
    if flux is not None:
        field = np.broadcast_to(flux(physical_points, tags),
                                scale.shape + (2, ))
        inverse_transposed = np.linalg.inv(jacobians).transpose(0, 2, 1)
        gradients = np.einsum('tij,qbj->tqbi', inverse_transposed,
                              reference_gradients)
        local += np.einsum('tq,tqi,tqai->ta', scale, field, gradients)
    load = np.zeros(dofmap.dof_count, dtype=complex)
    np.add.at(load, dofmap.element_dofs[triangle_ids], local)
    return load


def assemble_boundary_load(
        mesh: Mesh, dofmap: DofMap, tag: BoundaryTag,
        integrand: typing.Callable[[np.ndarray, np.ndarray], npt.ArrayLike]
) -> np.ndarray:
    """Assemble the load vector of a boundary integral int(f phi ds).

    The integrand is evaluated at the (E, Q, 2) Gauss points of the edges
    with the given tag together with the (E, 2) unit edge normals
    pointing out of the meshed region.

    """
    edges = mesh.edges_with(tag)
    if len(edges) == 0:
        raise FemError('no boundary edges with tag', tag=tag.keyword)
    gauss_points, gauss_weights = np.polynomial.legendre.leggauss(3)
    s = 0.5 * (gauss_points + 1.0)
    weights = 0.5 * gauss_weights
    start, end = mesh.nodes[edges[:, 0]], mesh.nodes[edges[:, 1]]
    lengths = np.linalg.norm(end - start, axis=1)
    points = start[:, np.newaxis] + s[np.newaxis, :, np.newaxis] * (
        end - start)[:, np.newaxis]
    normals = mesh.edge_normals(edges)
    f = np.broadcast_to(integrand(points, normals), points.shape[:2])
    scaled = f * lengths[:, np.newaxis] * weights
    if dofmap.degree == 1:
        basis = np.column_stack((1.0 - s, s))
        dofs = edges
    else:
        basis = np.column_stack(
            ((1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0),
             4.0 * s * (1.0 - s)))
        dofs = np.column_stack(
            (edges, mesh.node_count + mesh.edge_indices(edges)))
    load = np.zeros(dofmap.dof_count, dtype=complex)
    np.add.at(load, dofs, scaled @ basis)
    return load


class FieldInterpolator:
    """Evaluator of finite element fields at arbitrary points.

    """
    def __init__(self, dofmap: DofMap):
        self.__dofmap = dofmap

    @functools.cached_property
    def _inverse_transposed_jacobians(self) -> np.ndarray:
        mesh = self.__dofmap.mesh
        jacobians, _ = _jacobians(mesh.nodes[mesh.triangles])
        return np.linalg.inv(jacobians).transpose(0, 2, 1)

    def _locate(self, points: npt.ArrayLike, extrapolate: bool) \
            -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
        triangle_ids, barycentric = self.__dofmap.mesh.locator.locate(
            points, nearest=extrapolate)
        inside = triangle_ids >= 0
        return triangle_ids, barycentric, inside

    def evaluate(self, coefficients: npt.ArrayLike, points: npt.ArrayLike,
                 extrapolate: bool = False) -> np.ndarray:
        """Evaluate a field at points.

        Parameters
        ----------
        coefficients : array_like
            The N_h DoF values of the field.
        points : array_like
            The (P, 2) evaluation points.
        extrapolate : bool
            True if points outside the mesh take the value at the
            closest point of the nearest triangle (NaN otherwise).

        """
        coefficients = np.asarray(coefficients)
        triangle_ids, barycentric, inside = self._locate(points, extrapolate)
        values = np.full(len(triangle_ids), np.nan,
                         dtype=np.result_type(coefficients, float))
        if np.any(inside):
            basis, _ = shape_functions(self.__dofmap.degree,
                                       barycentric[inside])
            dofs = self.__dofmap.element_dofs[triangle_ids[inside]]
            values[inside] = np.sum(basis * coefficients[dofs], axis=1)
        return values

    def gradient(self, coefficients: npt.ArrayLike,
                 points: npt.ArrayLike) -> np.ndarray:
        """Evaluate the (P, 2) gradient of a field at points (NaN outside
        the mesh).

        """
        coefficients = np.asarray(coefficients)
        triangle_ids, barycentric, inside = self._locate(points, False)
        gradients = np.full((len(triangle_ids), 2), np.nan,
                            dtype=np.result_type(coefficients, float))
        if np.any(inside):
            _, reference_gradients = shape_functions(self.__dofmap.degree,
                                                     barycentric[inside])
            physical = np.einsum(
                'pij,pbj->pbi',
                self._inverse_transposed_jacobians[triangle_ids[inside]],
                reference_gradients)
            dofs = self.__dofmap.element_dofs[triangle_ids[inside]]
            gradients[inside] = np.einsum('pbi,pb->pi', physical,
                                          coefficients[dofs])
        return gradients
