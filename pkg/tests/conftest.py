import sys
from pathlib import Path

import numpy as np
import pytest

# make tests/oracles.py importable without turning tests/ into a package
sys.path.insert(0, str(Path(__file__).parent))

NU_GRID = tuple(round(0.05 * i, 2) for i in range(10)) + (0.49,)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture
def nu_grid() -> tuple[float, ...]:
    return NU_GRID
