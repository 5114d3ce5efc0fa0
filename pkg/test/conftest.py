import numpy as np
import pytest

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.utils.config import SEED_ENV_VAR


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def cyclic7():
    return FiniteSystem.cyclic(7)


@pytest.fixture
def split_system():
    # two cycles: (0 1 2) and (3 4 5 6)
    return FiniteSystem([1, 2, 0, 4, 5, 6, 3])


@pytest.fixture
def observable7(rng):
    return Observable.random(7, rng)
