import numpy as np
import pytest

from excitable import make_grid, make_time_grid


@pytest.fixture
def grid():
    """Small symmetric grid, cheap enough for property tests."""
    return make_grid(5.0, 101)


@pytest.fixture
def short_time():
    return make_time_grid(0.0, 1.0, 0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
