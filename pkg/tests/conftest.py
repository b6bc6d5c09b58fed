import pytest

from cloaksim.geometry import GeometrySpec
from cloaksim.geometry import Shape
from cloaksim.geometry import generate_mesh

_OUTER_RADIUS = 1.0

_CAVITY_RADIUS = 0.5

_CORE_RADIUS = 0.3

_COARSE_H = 0.2


@pytest.fixture(scope='session')
def annulus_geometry():
    return GeometrySpec(Shape.circle(_OUTER_RADIUS),
                        Shape.circle(_CAVITY_RADIUS))


@pytest.fixture(scope='session')
def cored_geometry():
    return GeometrySpec(Shape.circle(_OUTER_RADIUS),
                        Shape.circle(_CAVITY_RADIUS),
                        core=Shape.circle(_CORE_RADIUS))


@pytest.fixture(scope='session')
def coarse_h():
    return _COARSE_H


@pytest.fixture(scope='session')
def coarse_mesh(annulus_geometry):
    return generate_mesh(annulus_geometry, _COARSE_H)


@pytest.fixture(scope='session')
def coarse_exterior_mesh(annulus_geometry):
    return generate_mesh(annulus_geometry, _COARSE_H, include_exterior=True)
