import numpy as np
import pytest

from entwit import states


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def random_states(dims, count, seed0=0, rank=None):
    return [states.random_density(dims, seed0 + k, rank=rank) for k in range(count)]
