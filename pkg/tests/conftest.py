import math

import numpy as np
import pytest

from fockstab import (
    FeedbackConfig,
    default_gain,
    make_measurement,
    make_operators,
    mid_fringe_phi_r,
)

N_MAX = 15
N_BAR = 3
PHI = 0.3


def truncated_poisson(mean, n_max):
    """Renormalized Poisson weights on 0..n_max, by direct summation."""
    weights = np.array(
        [math.exp(-mean) * mean**n / math.factorial(n) for n in range(n_max + 1)]
    )
    return weights / weights.sum()


def fock_density(n, dim=N_MAX + 1):
    rho = np.zeros((dim, dim))
    rho[n, n] = 1.0
    return rho


@pytest.fixture(scope="session")
def ops():
    return make_operators(N_MAX)


@pytest.fixture(scope="session")
def model():
    return make_measurement(PHI, mid_fringe_phi_r(PHI, N_BAR), N_MAX)


@pytest.fixture(scope="session")
def fb():
    return FeedbackConfig(
        n_bar=N_BAR,
        c1=default_gain(N_BAR),
        epsilon=0.1,
        alpha_bar=0.1,
        grid_points=201,
    )
