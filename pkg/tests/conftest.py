import numpy as np
import pytest

from cloning_tradeoff.qmath import PureState, haar_kets


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def haar_states(rng):
    return [PureState(k) for k in haar_kets(rng, 100)]


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return m / np.trace(m).real
