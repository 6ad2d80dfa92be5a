import numpy as np
import pytest

from distvote.core import Districts, Instance

FIXTURE_RATINGS = "tests/data/ratings_fixture.csv"


def random_districts(n, k, rng):
    """Random partition into k non-empty districts of arbitrary sizes."""
    perm = [int(a) for a in rng.permutation(n)]
    if k == 1:
        return Districts((tuple(perm),))
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, n), size=k - 1, replace=False))
    bounds = [0] + cuts + [n]
    return Districts(tuple(tuple(perm[a:b]) for a, b in zip(bounds, bounds[1:])))


def random_instance(rng, n_max=30, m_max=6, k_max=None):
    """Seeded instance with simplex-uniform valuations and asymmetric districts."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    k = int(rng.integers(1, (k_max or n) + 1)) if n > 1 else 1
    k = min(k, n)
    vals = rng.dirichlet(np.ones(m), size=n)
    return Instance(vals, random_districts(n, k, rng))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ratings_path():
    return FIXTURE_RATINGS
