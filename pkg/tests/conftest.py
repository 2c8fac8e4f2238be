import numpy as np
import pytest

from ricci_ma import exact
from ricci_ma.radial import RadialGrid, RadialPotential


def make_potential(n, R, f, nodes=1024):
    return RadialPotential.from_function(RadialGrid.uniform(n, R, nodes), f)


@pytest.fixture
def star1():
    return make_potential(1, exact.star_radius(1), exact.phi_star(1), 4096)


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)
