import os

import numpy as np
import pytest

from fracred.chain import ChainModel

SEED = int(os.environ.get("FRACRED_SEED", "20240601"))


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    # hypothesis draws from the same seed unless --hypothesis-seed is given
    if config.getoption("hypothesis_seed", None) is None:
        config.option.hypothesis_seed = SEED


@pytest.fixture
def rng():
    """Seeded generator; override the seed with FRACRED_SEED."""
    return np.random.default_rng(SEED)


@pytest.fixture
def chain4():
    # 4-DOF benchmark: m1=m3=1, m2=m4=2, same pattern for k and c
    return ChainModel((1, 2, 1, 2), (1, 2, 1, 2), (1, 2, 1, 2))


@pytest.fixture
def sdof():
    return ChainModel((2,), (10,), (1,))


def random_chain(rng, n=None, damped=True):
    n = n or int(rng.integers(1, 6))
    masses = rng.uniform(0.5, 3.0, n)
    stiff = rng.uniform(0.5, 3.0, n)
    damp = rng.uniform(0.05, 1.0, n) if damped else np.zeros(n)
    return ChainModel(tuple(masses), tuple(stiff), tuple(damp))
