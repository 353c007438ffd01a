import numpy as np
import pytest

from config import config
from qps_lattice import TorusSpace
from verification import random_operator

SPACE_GRID = [
    (n, chi)
    for n in (2, 3, 4, 5)
    for chi in ((0.0, 0.0), (0.3, 0.7))
]


@pytest.fixture
def rng():
    return np.random.default_rng(config.DEFAULT_SEED)


@pytest.fixture
def make_operator(rng):
    """Factory for seeded random operators on a given space"""
    def _make(space: TorusSpace, hermitian: bool = False):
        return random_operator(space, rng, hermitian=hermitian)
    return _make


@pytest.fixture(params=SPACE_GRID, ids=lambda p: f"N{p[0]}-chi{p[1][0]}-{p[1][1]}")
def space(request):
    n, (chi_p, chi_q) = request.param
    return TorusSpace(n, chi_p, chi_q)
