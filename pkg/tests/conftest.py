import numpy as np
import pytest

from qdecomp import eigen_decomposition, mix, random_density, random_unitary
from qdecomp.rng import generator


@pytest.fixture
def rng():
    return generator(987654321)


def random_mixed_decomposition(dm, seed):
    """A random minimal decomposition of ``dm`` via a Haar remix of its eigenbasis."""
    base = eigen_decomposition(dm)
    if len(base) == 1:
        return base
    return mix(base, random_unitary(len(base), generator(seed)))


def random_state_pair(dim, seed, ranks=None):
    r = generator(seed, 99)
    if ranks is None:
        ranks = (int(r.integers(1, dim + 1)), int(r.integers(1, dim + 1)))
    rho = random_density(dim, ranks[0], seed)
    sigma = random_density(dim, ranks[1], seed + 1_000_003)
    return rho, sigma
