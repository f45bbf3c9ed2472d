import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from burgulence.field import Field, Grid

settings.register_profile(
    "unit", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("unit")


@pytest.fixture
def grid64():
    return Grid(64)


@pytest.fixture
def grid256():
    return Grid(256)


@pytest.fixture
def sine64(grid64):
    return Field.from_function(grid64, lambda x: np.sin(2.0 * np.pi * x))


@pytest.fixture
def random_field():
    """Band-limited zero-mean field with unit sup, deterministic per seed."""
    def make(grid, *, seed=0, k_max=8, amplitude=1.0):
        rng = np.random.default_rng(seed)
        c = np.zeros(grid.n // 2 + 1, dtype=complex)
        k = np.arange(1, k_max + 1)
        c[1:k_max + 1] = (rng.normal(size=k_max)
                          + 1j * rng.normal(size=k_max)) * np.exp(-0.5 * k)
        u = Field.from_spectral(grid, c)
        return u * (amplitude / u.lp_norm(np.inf))
    return make
