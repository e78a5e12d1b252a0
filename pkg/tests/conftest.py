import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vmblimits.collisions import CollisionBackend
from vmblimits.grid import SpectralGrid


@pytest.fixture(scope="session")
def small_grid() -> SpectralGrid:
    return SpectralGrid(d_x=1, N_x=8, N_v=6)


@pytest.fixture(scope="session")
def bgk(small_grid) -> CollisionBackend:
    return CollisionBackend(small_grid, "bgk")


@pytest.fixture(scope="session")
def spectral(small_grid) -> CollisionBackend:
    return CollisionBackend(small_grid, "spectral-diagonal")


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
