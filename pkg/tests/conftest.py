import pytest

from harmonic_convex.convex_core import Polytope, make_direction_grid
from harmonic_convex.harmonic import ball, make_boundary_mesh, polar_grid


@pytest.fixture(scope="session")
def disc():
    return ball([0.0, 0.0], 1.0)


@pytest.fixture(scope="session")
def mesh256(disc):
    return make_boundary_mesh(disc, 256)


@pytest.fixture(scope="session")
def grid256():
    return make_direction_grid(2, 256)


@pytest.fixture(scope="session")
def grid4():
    return make_direction_grid(2, 4)


@pytest.fixture(scope="session")
def polar100(disc):
    return polar_grid(disc, 5, 20, 0.1)


@pytest.fixture
def square():
    return Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]])


def random_polygon(rng, k=None):
    k = k or int(rng.integers(3, 9))
    pts = rng.normal(size=(k, 2)) * rng.uniform(0.2, 2.0) + rng.normal(size=2)
    return Polytope.from_points(pts)
