import numpy as np
import pytest

from meanfield_annealer import MagPair, ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def dense_spec():
    return ModelSpec.dense()


@pytest.fixture
def sparse_spec():
    return ModelSpec.sparse()


def random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_pair(rng):
    return MagPair(random_unit(rng), random_unit(rng))


def central_diff(f, m1, m2, step=1e-6):
    """Finite-difference gradient of f(m1, m2) in all six components."""
    g = np.zeros(6)
    base = np.concatenate([m1, m2])
    for i in range(6):
        up = base.copy()
        dn = base.copy()
        up[i] += step
        dn[i] -= step
        g[i] = (f(up[:3], up[3:]) - f(dn[:3], dn[3:])) / (2 * step)
    return g[:3], g[3:]
