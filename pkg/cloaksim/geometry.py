"""Module for generating and managing conforming triangular meshes of the
nested cloaking geometries.

The geometries consist of a core Sigma, a cavity D and a shell region
Omega (all centred at the origin), optionally embedded in a square
physical box surrounded by a PML collar.

"""
import dataclasses
import enum
import functools
import logging
import math
import pathlib
import typing

import numpy as np
import numpy.typing as npt
import scipy.spatial  # type: ignore
import scipy.special  # type: ignore
import triangle  # type: ignore

from cloaksim.exceptions import CloakSimError

_logger = logging.getLogger(__name__)

_MIN_ANGLE: typing.Final[float] = 25.0
"""Minimum triangle angle (degrees) requested from the mesher."""

_MARKER_OFFSET: typing.Final[int] = 2
"""Offset of boundary tags in mesher markers (0 and 1 are reserved)."""

_PML_INTERFACE_MARKER: typing.Final[int] = 16
"""Mesher marker of the interface between the physical box and the PML."""

_NESTING_SAMPLES: typing.Final[int] = 2048
"""Number of boundary samples used to check the shape nesting."""

_LOCATOR_CANDIDATES: typing.Final[int] = 12
"""Number of nearest triangles tested per point before a full search."""

_BARYCENTRIC_TOLERANCE: typing.Final[float] = 1e-10
"""Tolerance for a point to count as inside a triangle."""


class GeometryError(CloakSimError):
    """Exception class for all geometry and mesh errors.

    """
    pass


class NestedShapeError(GeometryError):
    """Exception to be raised if the shapes are not strictly nested.

    """
    def __init__(self, **kwargs: typing.Any):
        # Docstring inherited
        super().__init__('shapes are not strictly nested', **kwargs)


class MeshTooCoarseError(GeometryError):
    """Exception to be raised if the mesh size cannot separate the
    boundaries of the nested shapes.

    """
    def __init__(self, **kwargs: typing.Any):
        # Docstring inherited
        super().__init__('mesh size too coarse for the geometry', **kwargs)


class MeshFormatError(GeometryError):
    """Exception to be raised if a mesh file is malformed.

    """
    def __init__(self, **kwargs: typing.Any):
        # Docstring inherited
        super().__init__('malformed mesh file', **kwargs)


class ShapeKind(enum.Enum):
    """Enumeration of the supported shape kinds.

    """
    CIRCLE = 'circle'
    ELLIPSE = 'ellipse'
    SQUARE = 'square'


@dataclasses.dataclass(frozen=True)
class Shape:
    """Closed convex shape centred at the origin.

    Attributes
    ----------
    kind : ShapeKind
        The kind of the shape.
    a : float
        The radius, the semi-axis along x, or the half-width.
    b : float
        The semi-axis along y (equal to a for circles and squares).

    """
    kind: ShapeKind
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise GeometryError('shape sizes must be positive', shape=self)
        if self.kind is not ShapeKind.ELLIPSE and self.a != self.b:
            raise GeometryError('only ellipses may have distinct axes',
                                shape=self)

    @staticmethod
    def circle(radius: float) -> 'Shape':
        return Shape(ShapeKind.CIRCLE, radius, radius)

    @staticmethod
    def ellipse(a: float, b: float) -> 'Shape':
        return Shape(ShapeKind.ELLIPSE, a, b)

    @staticmethod
    def square(halfwidth: float) -> 'Shape':
        return Shape(ShapeKind.SQUARE, halfwidth, halfwidth)

    @property
    def area(self) -> float:
        if self.kind is ShapeKind.SQUARE:
            return 4.0 * self.a * self.b
        return math.pi * self.a * self.b

    @property
    def perimeter(self) -> float:
        if self.kind is ShapeKind.SQUARE:
            return 4.0 * (self.a + self.b)
        major, minor = max(self.a, self.b), min(self.a, self.b)
        return 4.0 * major * float(
            scipy.special.ellipe(1.0 - (minor / major)**2))

    @property
    def circumradius(self) -> float:
        """Radius of the smallest origin-centred disc containing the
        shape.

        """
        if self.kind is ShapeKind.SQUARE:
            return math.hypot(self.a, self.b)
        return max(self.a, self.b)

    @property
    def halfwidth(self) -> float:
        """Half-width of the shape's axis-aligned bounding box."""
        return max(self.a, self.b)

    def gauge(self, points: npt.ArrayLike) -> np.ndarray:
        """Evaluate the gauge function of the shape (the shape is the set
        of points with gauge smaller than one).

        """
        points = np.asarray(points, dtype=float)
        x = points[..., 0] / self.a
        y = points[..., 1] / self.b
        if self.kind is ShapeKind.SQUARE:
            return np.maximum(np.abs(x), np.abs(y))
        return np.hypot(x, y)

    def contains(self, points: npt.ArrayLike,
                 tolerance: float = 0.0) -> np.ndarray:
        return self.gauge(points) < 1.0 + tolerance

    def project(self, points: npt.ArrayLike) -> np.ndarray:
        """Project points radially onto the boundary of the shape."""
        points = np.asarray(points, dtype=float)
        return points / self.gauge(points)[..., np.newaxis]

    def sample(self, count: int) -> np.ndarray:
        """Sample points uniformly in the boundary parameter.

        The parameter is the polar angle of the parametrisation
        (a cos t, b sin t) for circles and ellipses, and the arclength
        (counter-clockwise from (a, 0)) for squares.

        """
        if self.kind is not ShapeKind.SQUARE:
            t = 2.0 * math.pi * np.arange(count) / count
            return np.column_stack((self.a * np.cos(t), self.b * np.sin(t)))
        s = 8.0 * self.a * np.arange(count) / count
        s = (s + self.a) % (8.0 * self.a)
        side = np.floor(s / (2.0 * self.a)).astype(int)
        offset = s - 2.0 * self.a * side - self.a
        x = np.choose(side,
                      [self.a + 0 * offset, -offset, -self.a + 0 * offset,
                       offset])
        y = np.choose(side, [offset, self.a + 0 * offset, -offset,
                             -self.a + 0 * offset])
        return np.column_stack((x, y))

    def boundary_polygon(self, h: float) -> np.ndarray:
        """Discretise the boundary counter-clockwise with edge lengths not
        exceeding h (square corners are always polygon vertices).

        """
        if self.kind is not ShapeKind.SQUARE:
            count = max(8, math.ceil(2.0 * math.pi * self.halfwidth / h))
            return self.sample(count)
        per_side = max(1, math.ceil(2.0 * self.a / h))
        corners = np.array([[self.a, -self.a], [self.a, self.a],
                            [-self.a, self.a], [-self.a, -self.a]])
        pieces = []
        for k in range(4):
            start, end = corners[k], corners[(k + 1) % 4]
            t = np.arange(per_side)[:, np.newaxis] / per_side
            pieces.append(start + t * (end - start))
        return np.vstack(pieces)


class RegionTag(enum.IntEnum):
    """Enumeration of the triangle region tags.

    """
    CORE = 0
    LOSSY = 1
    SHELL = 2
    EXTERIOR = 3
    PML = 4

    @property
    def keyword(self) -> str:
        return self.name.lower()

    @staticmethod
    def from_keyword(keyword: str) -> 'RegionTag':
        for tag in RegionTag:
            if tag.keyword == keyword:
                return tag
        raise NameError(keyword)


CAVITY_REGIONS: typing.Final[frozenset[RegionTag]] = frozenset(
    {RegionTag.CORE, RegionTag.LOSSY})
"""Regions making up the cavity D."""

SCATTERER_REGIONS: typing.Final[frozenset[RegionTag]] = frozenset(
    {RegionTag.CORE, RegionTag.LOSSY, RegionTag.SHELL})
"""Regions making up Omega."""


class BoundaryTag(enum.IntEnum):
    """Enumeration of the boundary edge tags.

    """
    SIGMA = 0
    CAVITY = 1
    OUTER = 2
    BOX = 3

    @property
    def keyword(self) -> str:
        return _BOUNDARY_KEYWORDS[self]

    @staticmethod
    def from_keyword(keyword: str) -> 'BoundaryTag':
        for tag, tag_keyword in _BOUNDARY_KEYWORDS.items():
            if tag_keyword == keyword:
                return tag
        raise NameError(keyword)


_BOUNDARY_KEYWORDS: typing.Final[dict[BoundaryTag, str]] = {
    BoundaryTag.SIGMA: 'dSigma',
    BoundaryTag.CAVITY: 'dD',
    BoundaryTag.OUTER: 'dOmega',
    BoundaryTag.BOX: 'box'
}


@dataclasses.dataclass(frozen=True)
class GeometrySpec:
    """Nested geometry Sigma (optional) in D in Omega in the physical box.

    Attributes
    ----------
    outer : Shape
        The shape of Omega.
    cavity : Shape
        The shape of the cavity D.
    core : Shape or None
        The shape of the core Sigma.
    box_halfwidth : float
        The half-width L of the physical computational box.
    pml_thickness : float
        The thickness d of the PML collar.

    """
    outer: Shape
    cavity: Shape
    core: typing.Optional[Shape] = None
    box_halfwidth: float = 2.2
    pml_thickness: float = 0.6

    def __post_init__(self) -> None:
        if not (self.box_halfwidth > 0 and self.pml_thickness > 0):
            raise GeometryError('box sizes must be positive',
                                box_halfwidth=self.box_halfwidth,
                                pml_thickness=self.pml_thickness)

    def nested_shapes(self) -> typing.List[Shape]:
        """The shapes ordered from innermost to outermost."""
        shapes = [] if self.core is None else [self.core]
        return shapes + [self.cavity, self.outer]

    def validate(self, h: typing.Optional[float] = None) -> None:
        """Check the strict nesting of the shapes (and the separation of
        their boundaries by a mesh of size h).

        Raises
        ------
        NestedShapeError
            If the shapes are not strictly nested.
        MeshTooCoarseError
            If h exceeds the clearance between neighbouring boundaries.

        """
        if h is not None and not h > 0:
            raise GeometryError('mesh size must be positive', h=h)
        shapes = self.nested_shapes()
        clearances = []
        for inner, outer in zip(shapes[:-1], shapes[1:]):
            samples = inner.sample(_NESTING_SAMPLES)
            if not np.all(outer.contains(samples, tolerance=-1e-12)):
                raise NestedShapeError(inner=inner, outer=outer)
            clearances.append(_clearance(inner, outer))
        if not self.outer.halfwidth < self.box_halfwidth:
            raise NestedShapeError(inner=self.outer,
                                   box_halfwidth=self.box_halfwidth)
        clearances.append(self.box_halfwidth - self.outer.halfwidth)
        if h is not None and h > min(clearances) + 1e-12:
            raise MeshTooCoarseError(h=h, clearance=min(clearances))

    def validate_evaluation_radius(self, radius: float) -> None:
        """Check that the evaluation circle lies strictly between Omega
        and the PML.

        Raises
        ------
        NestedShapeError
            If the evaluation circle intersects Omega or the PML.

        """
        if not self.outer.circumradius < radius < self.box_halfwidth:
            raise NestedShapeError(evaluation_radius=radius,
                                   circumradius=self.outer.circumradius,
                                   box_halfwidth=self.box_halfwidth)


def _clearance(inner: Shape, outer: Shape) -> float:
    inner_samples = inner.sample(_NESTING_SAMPLES)
    outer_samples = outer.sample(2 * _NESTING_SAMPLES)
    distances, _ = scipy.spatial.cKDTree(outer_samples).query(inner_samples)
    return float(np.min(distances))


@dataclasses.dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming triangulation with region and boundary tags.

    Attributes
    ----------
    nodes : np.ndarray
        The (N, 2) node coordinates.
    triangles : np.ndarray
        The (T, 3) counter-clockwise node indices of the triangles.
    triangle_tags : np.ndarray
        The (T,) region tags (RegionTag values) of the triangles.
    boundary_edges : np.ndarray
        The (E, 2) node indices of the tagged boundary edges.
    edge_tags : np.ndarray
        The (E,) boundary tags (BoundaryTag values) of the edges.
    h : float
        The target edge length.

    """
    nodes: np.ndarray
    triangles: np.ndarray
    triangle_tags: np.ndarray
    boundary_edges: np.ndarray
    edge_tags: np.ndarray
    h: float

    def __post_init__(self) -> None:
        arrays = {
            'nodes': np.array(self.nodes, dtype=float).reshape(-1, 2),
            'triangles': np.array(self.triangles, dtype=np.int64).reshape(
                -1, 3),
            'triangle_tags': np.array(self.triangle_tags, dtype=np.int64),
            'boundary_edges': np.array(self.boundary_edges,
                                       dtype=np.int64).reshape(-1, 2),
            'edge_tags': np.array(self.edge_tags, dtype=np.int64)
        }
        for name, array in arrays.items():
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    @functools.cached_property
    def diameter(self) -> float:
        extent = self.nodes.max(axis=0) - self.nodes.min(axis=0)
        return float(np.hypot(*extent))

    @functools.cached_property
    def centroids(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    def signed_areas(self) -> np.ndarray:
        corners = self.nodes[self.triangles]
        first = corners[:, 1] - corners[:, 0]
        second = corners[:, 2] - corners[:, 0]
        return 0.5 * (first[:, 0] * second[:, 1] - first[:, 1] * second[:, 0])

    def triangles_in(self, *regions: RegionTag) -> np.ndarray:
        """Indices of the triangles carrying one of the given tags."""
        return np.flatnonzero(np.isin(self.triangle_tags,
                                      [int(region) for region in regions]))

    def region_area(self, *regions: RegionTag) -> float:
        return float(np.sum(self.signed_areas()[self.triangles_in(*regions)]))

    def has_region(self, region: RegionTag) -> bool:
        return bool(np.any(self.triangle_tags == int(region)))

    def edges_with(self, tag: BoundaryTag) -> np.ndarray:
        return self.boundary_edges[self.edge_tags == int(tag)]

    def has_boundary(self, tag: BoundaryTag) -> bool:
        return bool(np.any(self.edge_tags == int(tag)))

    def boundary_nodes(self, tag: BoundaryTag) -> np.ndarray:
        return np.unique(self.edges_with(tag))

    @functools.cached_property
    def edge_table(self) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Unique edges and the triangle-to-edge map.

        Returns
        -------
        tuple of np.ndarray
            The (K, 2) sorted node pairs of the unique edges and the
            (T, 3) edge indices of the local edges (0, 1), (1, 2) and
            (2, 0) of every triangle.

        """
        local = np.stack((self.triangles[:, [0, 1]], self.triangles[:, [1, 2]],
                          self.triangles[:, [2, 0]]), axis=1).reshape(-1, 2)
        local = np.sort(local, axis=1)
        edges, inverse = np.unique(local, axis=0, return_inverse=True)
        return edges, inverse.reshape(-1, 3)

    def edge_indices(self, pairs: npt.ArrayLike) -> np.ndarray:
        """Indices (into the unique edges) of the given node pairs."""
        edges, _ = self.edge_table
        pairs = np.sort(np.asarray(pairs, dtype=np.int64).reshape(-1, 2),
                        axis=1)
        keys = edges[:, 0] * self.node_count + edges[:, 1]
        wanted = pairs[:, 0] * self.node_count + pairs[:, 1]
        positions = np.searchsorted(keys, wanted)
        positions = np.minimum(positions, len(keys) - 1)
        if not np.all(keys[positions] == wanted):
            raise GeometryError('node pair is not a mesh edge')
        return positions

    def free_edges(self) -> np.ndarray:
        """Edges belonging to exactly one triangle."""
        edges, triangle_edges = self.edge_table
        counts = np.bincount(triangle_edges.ravel(), minlength=len(edges))
        return edges[counts == 1]

    def edge_normals(self, pairs: npt.ArrayLike) -> np.ndarray:
        """Unit normals of edges pointing away from an adjacent triangle.

        For edges on the boundary of the meshed region the normals are
        outward normals of the region.

        """
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        edge_ids = self.edge_indices(pairs)
        _, triangle_edges = self.edge_table
        adjacent = np.full(len(self.edge_table[0]), -1, dtype=np.int64)
        adjacent[triangle_edges.ravel()] = np.repeat(
            np.arange(self.triangle_count), 3)
        owners = adjacent[edge_ids]
        start, end = self.nodes[pairs[:, 0]], self.nodes[pairs[:, 1]]
        tangent = end - start
        normals = np.column_stack((tangent[:, 1], -tangent[:, 0]))
        normals /= np.linalg.norm(normals, axis=1)[:, np.newaxis]
        away = 0.5 * (start + end) - self.centroids[owners]
        flip = np.einsum('ij,ij->i', normals, away) < 0
        normals[flip] *= -1.0
        return normals

    def min_angles(self) -> np.ndarray:
        """Smallest interior angle (degrees) of every triangle."""
        corners = self.nodes[self.triangles]
        angles = []
        for k in range(3):
            first = corners[:, (k + 1) % 3] - corners[:, k]
            second = corners[:, (k + 2) % 3] - corners[:, k]
            cosine = np.einsum('ij,ij->i', first, second) / (
                np.linalg.norm(first, axis=1) *
                np.linalg.norm(second, axis=1))
            angles.append(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))
        return np.min(np.column_stack(angles), axis=1)

    @functools.cached_property
    def locator(self) -> 'PointLocator':
        return PointLocator(self)


def generate_mesh(spec: GeometrySpec, h: float,
                  include_exterior: bool = False,
                  keep_cavity: bool = True) -> Mesh:
    """Generate a conforming triangular mesh of the nested geometry.

    Parameters
    ----------
    spec : GeometrySpec
        The geometry to mesh.
    h : float
        The target edge length.
    include_exterior : bool
        True if the physical box and the PML collar are meshed too.
    keep_cavity : bool
        True if the cavity D is meshed (False leaves a hole in D).

    Returns
    -------
    Mesh
        The generated mesh.

    Raises
    ------
    GeometryError
        If the geometry is invalid or too fine for the mesh size.

    """
    spec.validate(h)
    curves: typing.List[typing.Tuple[np.ndarray, int]] = []
    if keep_cavity and spec.core is not None:
        curves.append((spec.core.boundary_polygon(h),
                       BoundaryTag.SIGMA + _MARKER_OFFSET))
    curves.append((spec.cavity.boundary_polygon(h),
                   BoundaryTag.CAVITY + _MARKER_OFFSET))
    curves.append((spec.outer.boundary_polygon(h),
                   BoundaryTag.OUTER + _MARKER_OFFSET))
    box, collar = spec.box_halfwidth, spec.pml_thickness
    if include_exterior:
        curves.append((Shape.square(box).boundary_polygon(h),
                       _PML_INTERFACE_MARKER))
        curves.append((Shape.square(box + collar).boundary_polygon(h),
                       BoundaryTag.BOX + _MARKER_OFFSET))
    vertices, segments, markers = [], [], []
    offset = 0
    for polygon, marker in curves:
        count = len(polygon)
        vertices.append(polygon)
        index = np.arange(count) + offset
        segments.append(np.column_stack((index, np.roll(index, -1))))
        markers.append(np.full(count, marker))
        offset += count
    regions = _region_seeds(spec, include_exterior, keep_cavity)
    max_area = math.sqrt(3.0) / 4.0 * h * h
    mesher_input: typing.Dict[str, typing.Any] = {
        'vertices': np.vstack(vertices),
        'vertex_markers': np.concatenate(markers).reshape(-1, 1),
        'segments': np.vstack(segments),
        'segment_markers': np.concatenate(markers).reshape(-1, 1),
        'regions': np.array(regions, dtype=float)
    }
    if not keep_cavity:
        mesher_input['holes'] = np.zeros((1, 2))
    output = triangle.triangulate(mesher_input,
                                  f'pq{_MIN_ANGLE:g}Aa{max_area:.12g}Q')
    nodes = np.array(output['vertices'], dtype=float)
    vertex_markers = np.asarray(output['vertex_markers']).ravel()
    for shape, tag in ((spec.core, BoundaryTag.SIGMA),
                       (spec.cavity, BoundaryTag.CAVITY), (spec.outer,
                                                           BoundaryTag.OUTER)):
        on_curve = vertex_markers == tag + _MARKER_OFFSET
        if shape is not None and np.any(on_curve):
            nodes[on_curve] = shape.project(nodes[on_curve])
    attributes = np.rint(np.asarray(
        output['triangle_attributes']).ravel()).astype(np.int64)
    if np.any(attributes < 1):
        raise GeometryError('unseeded region in generated mesh')
    segment_markers = np.asarray(output['segment_markers']).ravel()
    tagged = np.isin(segment_markers,
                     [tag + _MARKER_OFFSET for tag in BoundaryTag])
    mesh = Mesh(nodes, output['triangles'], attributes - 1,
                np.asarray(output['segments'])[tagged],
                segment_markers[tagged] - _MARKER_OFFSET, h)
    _logger.info(
        'mesh generated', extra={
            'h': h,
            'nodes': mesh.node_count,
            'triangles': mesh.triangle_count,
            'exterior': include_exterior
        })
    return mesh


def _region_seeds(spec: GeometrySpec, include_exterior: bool,
                  keep_cavity: bool) -> typing.List[typing.List[float]]:
    def seed(x: float, region: RegionTag) -> typing.List[float]:
        # Region attributes start at 1 (0 marks unseeded triangles)
        return [x, 0.0, float(region + 1), 0.0]

    seeds = []
    if keep_cavity:
        if spec.core is None:
            seeds.append(seed(0.0, RegionTag.LOSSY))
        else:
            seeds.append(seed(0.0, RegionTag.CORE))
            seeds.append(seed(0.5 * (spec.core.a + spec.cavity.a),
                              RegionTag.LOSSY))
    seeds.append(seed(0.5 * (spec.cavity.a + spec.outer.a), RegionTag.SHELL))
    if include_exterior:
        seeds.append(seed(0.5 * (spec.outer.a + spec.box_halfwidth),
                          RegionTag.EXTERIOR))
        seeds.append(seed(spec.box_halfwidth + 0.5 * spec.pml_thickness,
                          RegionTag.PML))
    return seeds


def region_of_points(spec: GeometrySpec,
                     points: npt.ArrayLike) -> np.ndarray:
    """Analytic region membership of points (RegionTag values)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    regions = np.full(len(points), int(RegionTag.PML))
    in_box = np.max(np.abs(points), axis=1) < spec.box_halfwidth
    regions[in_box] = RegionTag.EXTERIOR
    regions[spec.outer.contains(points)] = RegionTag.SHELL
    regions[spec.cavity.contains(points)] = RegionTag.LOSSY
    if spec.core is not None:
        regions[spec.core.contains(points)] = RegionTag.CORE
    return regions


class PointLocator:
    """Locator of points in the triangles of a mesh.

    """
    def __init__(self, mesh: Mesh):
        self.__mesh = mesh
        self.__tree = scipy.spatial.cKDTree(mesh.centroids)
        corners = mesh.nodes[mesh.triangles]
        self.__origins = corners[:, 0]
        jacobians = np.stack((corners[:, 1] - corners[:, 0],
                              corners[:, 2] - corners[:, 0]), axis=2)
        self.__inverse_jacobians = np.linalg.inv(jacobians)

    def _barycentric(self, triangle_ids: np.ndarray,
                     points: np.ndarray) -> np.ndarray:
        local = np.einsum('...ij,...j->...i',
                          self.__inverse_jacobians[triangle_ids],
                          points - self.__origins[triangle_ids])
        return np.concatenate((1.0 - local.sum(axis=-1, keepdims=True),
                               local), axis=-1)

    def locate(self, points: npt.ArrayLike, nearest: bool = False) \
            -> typing.Tuple[np.ndarray, np.ndarray]:
        """Locate points in the mesh.

        Parameters
        ----------
        points : array_like
            The (P, 2) points to locate.
        nearest : bool
            True if points outside the mesh are assigned to the nearest
            candidate triangle (with clamped barycentric coordinates).

        Returns
        -------
        tuple of np.ndarray
            The (P,) triangle indices (-1 for points outside the mesh)
            and the (P, 3) barycentric coordinates (NaN outside).

        """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        count = min(_LOCATOR_CANDIDATES, self.__mesh.triangle_count)
        _, candidates = self.__tree.query(points, k=count)
        candidates = np.asarray(candidates).reshape(len(points), count)
        barycentric = self._barycentric(candidates, points[:, np.newaxis])
        worst = barycentric.min(axis=2)
        best = np.argmax(worst, axis=1)
        rows = np.arange(len(points))
        triangle_ids = candidates[rows, best]
        coordinates = barycentric[rows, best]
        found = worst[rows, best] >= -_BARYCENTRIC_TOLERANCE
        for index in np.flatnonzero(~found):
            all_barycentric = self._barycentric(
                np.arange(self.__mesh.triangle_count), points[index])
            inside = np.flatnonzero(
                all_barycentric.min(axis=1) >= -_BARYCENTRIC_TOLERANCE)
            if len(inside) > 0:
                triangle_ids[index] = inside[0]
                coordinates[index] = all_barycentric[inside[0]]
                found[index] = True
        if not nearest:
            triangle_ids = np.where(found, triangle_ids, -1)
            coordinates[~found] = np.nan
        coordinates = np.clip(coordinates, 0.0, 1.0)
        coordinates /= coordinates.sum(axis=1, keepdims=True)
        return triangle_ids, coordinates


def locate_point(
    mesh: Mesh, x: npt.ArrayLike
) -> typing.Optional[typing.Tuple[int, np.ndarray]]:
    """Locate a point in a mesh.

    Parameters
    ----------
    mesh : Mesh
        The mesh to search.
    x : array_like
        The point coordinates.

    Returns
    -------
    tuple or None
        The triangle index and the barycentric coordinates of the
        point, or None if the point lies outside the mesh.

    """
    triangle_ids, coordinates = mesh.locator.locate(np.reshape(x, (1, 2)))
    if triangle_ids[0] < 0:
        return None
    return int(triangle_ids[0]), coordinates[0]


def export_mesh(mesh: Mesh, path: typing.Union[str, pathlib.Path]) -> None:
    """Write a mesh in the ASCII mesh format.

    The format consists of a header line "nodes N triangles T edges E",
    N lines "x y", T lines "i j k region_tag" and E lines
    "i j boundary_tag" (0-based indices, keyword tags).

    """
    lines = [
        f'nodes {mesh.node_count} triangles {mesh.triangle_count} '
        f'edges {len(mesh.boundary_edges)}'
    ]
    lines.extend(f'{float(x)!r} {float(y)!r}' for x, y in mesh.nodes)
    lines.extend(f'{i} {j} {k} {RegionTag(tag).keyword}'
                 for (i, j, k), tag in zip(mesh.triangles.tolist(),
                                           mesh.triangle_tags.tolist()))
    lines.extend(f'{i} {j} {BoundaryTag(tag).keyword}'
                 for (i, j), tag in zip(mesh.boundary_edges.tolist(),
                                        mesh.edge_tags.tolist()))
    pathlib.Path(path).write_text('\n'.join(lines) + '\n')


def import_mesh(path: typing.Union[str, pathlib.Path],
                h: typing.Optional[float] = None) -> Mesh:
    """Read a mesh in the ASCII mesh format.

    Parameters
    ----------
    path : str or pathlib.Path
        The path of the mesh file.
    h : float or None
        The target edge length (the longest edge length if None).

    Raises
    ------
    MeshFormatError
        If the file is malformed, references nonexistent nodes, or
        leaves a boundary edge untagged.

    """
    lines = [
        line.split() for line in pathlib.Path(path).read_text().splitlines()
        if line.strip()
    ]
    try:
        header = lines[0]
        if (len(header) != 6 or header[0] != 'nodes'
                or header[2] != 'triangles' or header[4] != 'edges'):
            raise MeshFormatError(path=str(path), line=1)
        node_count, triangle_count, edge_count = (int(header[1]),
                                                  int(header[3]),
                                                  int(header[5]))
        if len(lines) != 1 + node_count + triangle_count + edge_count:
            raise MeshFormatError(path=str(path), reason='wrong line count')
        body = lines[1:]
        nodes = [[float(value) for value in line]
                 for line in body[:node_count]]
        triangle_lines = body[node_count:node_count + triangle_count]
        edge_lines = body[node_count + triangle_count:]
        triangles = [[int(value) for value in line[:3]]
                     for line in triangle_lines]
        triangle_tags = [
            RegionTag.from_keyword(line[3]) for line in triangle_lines
        ]
        edges = [[int(value) for value in line[:2]] for line in edge_lines]
        edge_tags = [BoundaryTag.from_keyword(line[2]) for line in edge_lines]
        if any(len(node) != 2 for node in nodes) or any(
                len(line) != 4 for line in triangle_lines) or any(
                    len(line) != 3 for line in edge_lines):
            raise MeshFormatError(path=str(path), reason='wrong field count')
    except (IndexError, ValueError, NameError):
        raise MeshFormatError(path=str(path))
    flat = [index for entry in triangles + edges for index in entry]
    if any(index < 0 or index >= node_count for index in flat):
        raise MeshFormatError(path=str(path), reason='node index out of range')
    if h is None:
        corners = np.array(nodes)[np.array(triangles)]
        h = float(
            np.max(
                np.linalg.norm(corners - np.roll(corners, -1, axis=1),
                               axis=2)))
    mesh = Mesh(nodes, triangles, triangle_tags, edges, edge_tags, h)
    if np.any(mesh.signed_areas() <= 0):
        raise MeshFormatError(path=str(path),
                              reason='non-positive triangle area')
    free = {tuple(edge) for edge in mesh.free_edges().tolist()}
    tagged = {
        tuple(edge)
        for edge in np.sort(mesh.boundary_edges, axis=1).tolist()
    }
    if not free <= tagged:
        raise MeshFormatError(path=str(path), reason='untagged boundary edge')
    return mesh
