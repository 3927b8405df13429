import numpy as np
import pytest

from chiral_phonons import OptoParams, PhononDamping, build_mode_grid, centered_grid


@pytest.fixture
def small_grid():
    return build_mode_grid(2, 0.01, 1.0, 1.0)


@pytest.fixture
def damping():
    return PhononDamping(1e-3)


@pytest.fixture
def opto():
    return OptoParams(detuning=-1.0, kappa=0.05, coupling_speed=0.02, q_center=1.0, phonon_width=5e-4)


@pytest.fixture
def dense_setup():
    """Continuum-like grid: rho*gamma = 10 with a band 40 gamma/v wide."""
    gamma = 1e-3
    grid = centered_grid(1.0, 1e-4, 1.0, 40 * gamma)
    opto = OptoParams(-1.0, 100 * gamma, 0.05, 1.0, phonon_width=gamma / 2)
    return grid, opto, PhononDamping(gamma)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
