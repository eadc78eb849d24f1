import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density(rng, d, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_distribution(rng, d, zeros=0):
    p = rng.exponential(size=d)
    if zeros:
        p[rng.choice(d, size=min(zeros, d - 1), replace=False)] = 0.0
    return p / p.sum()
