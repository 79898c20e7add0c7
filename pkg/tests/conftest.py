import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from memoria import Config, new_engine

# first kernel call may JIT-compile; never let hypothesis time it
settings.register_profile(
    "memoria",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("memoria")


@pytest.fixture
def tiny_config():
    return Config(dim=3, n_wm=3, stm_capacity=6, n_stm_rem=2, n_ltm_rem=2,
                  n_depth=3, initial_lifespan=9.0, alpha=2.0)


@pytest.fixture
def engine(tiny_config):
    return new_engine(tiny_config)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def uniform(result):
    return {i: 1.0 for i in result.rem}
