import math

import numpy as np
import pytest

from csmtunnel.cli_io import PRESETS
from csmtunnel.deep_map import solve_deep
from csmtunnel.elasticity import MaterialParams, solve_series
from csmtunnel.geometry import Arc, Line, build_boundary, discretize
from csmtunnel.shallow_map import solve_shallow


def horseshoe_spec():
    return build_boundary([Arc(0, 5, 1.5 * math.pi, 0), Line(5, 5 - 4.5j),
                           Arc(4.5 - 4.5j, 0.5, 0, -0.5 * math.pi, True), Line(4.5 - 5j, -5j)])


def circle_points(n, radius=1.0, center=0.0):
    """Clockwise uniform points starting at angle 0."""
    return center + radius * np.exp(-2j * np.pi * np.arange(n) / n)


@pytest.fixture(scope="session")
def horseshoe_cs():
    return discretize(horseshoe_spec(), [120, 30, 20, 30])


@pytest.fixture(scope="session")
def circle_cs():
    return discretize(build_boundary([Arc(0, 5, 0, -2 * math.pi)]), [64])


@pytest.fixture(scope="session")
def deep_circle(circle_cs):
    return solve_deep(circle_cs, 0.0, 1.0)


@pytest.fixture(scope="session")
def deep_horseshoe(horseshoe_cs):
    return solve_deep(horseshoe_cs)


@pytest.fixture(scope="session")
def shallow_horseshoe(horseshoe_cs):
    return solve_shallow(horseshoe_cs.translated(-10j), z_c2=-10j)


@pytest.fixture(scope="session")
def shallow_circle():
    p = PRESETS["circle-shallow"]
    return solve_shallow(p.collocation(), p.z_c2)


@pytest.fixture(scope="session")
def table1():
    return MaterialParams.table1()


@pytest.fixture(scope="session")
def horseshoe_solution(shallow_horseshoe, table1):
    return solve_series(shallow_horseshoe, table1, n0=60)


@pytest.fixture(scope="session")
def circle_solution(shallow_circle, table1):
    return solve_series(shallow_circle, table1, n0=40)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
