"""Shared fixtures.

Grids and banks are immutable, so the expensive ones are session
scoped.  Everything else is built where it is used.
"""

import numpy as np
import pytest

from halfspace_spectral import make_grid
from halfspace_spectral.experiments import get_bank


@pytest.fixture(scope="session")
def grid1d():
    """Workhorse 1-D grid, fine enough for every spectral identity."""
    return make_grid(1, 16.0, 4096)


@pytest.fixture(scope="session")
def grid1d_small():
    return make_grid(1, 16.0, 512)


@pytest.fixture(scope="session")
def grid2d():
    return make_grid(2, 8.0, 256)


@pytest.fixture(scope="session")
def bank1d(grid1d):
    return get_bank(grid1d)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260818)
