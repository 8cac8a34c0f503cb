import os

from fractions import Fraction

import pytest

from hypothesis import settings

from epsnet.bench.generators import generate_points
from epsnet.nets.geometry import Point, PointSet

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
profile = os.environ.get("EPSNET_PROFILE", "default")
settings.load_profile(profile)


@pytest.fixture
def kite():
    """A generic convex quadrilateral and the crossing point of its diagonals."""
    ps = PointSet.of([(0, 0), (4, 1), (5, 5), (1, 4)], general_position=True)
    return ps, Point(Fraction(5, 2), Fraction(5, 2))


@pytest.fixture
def unit_square():
    return PointSet.of([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def uniform24():
    return generate_points("uniform", 24, 7)
