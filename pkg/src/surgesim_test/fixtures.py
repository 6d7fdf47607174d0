import pytest

from surgesim.dynamics import TheoryParams
from surgesim.market import AgentParams, TruncatedNormalSpec

from .infra import SCENARIOS_DIR

from pathlib import Path

__all__ = [
    'spill_over_params',
    'localized_params',
    'inversion_params',
    'small_agent_params',
    'scenarios_dir',
]


@pytest.fixture(scope='session')
def spill_over_params() -> TheoryParams:
    return TheoryParams(
        lam=30, mu=50, d0_surge=1000, d0_nonsurge=200, k=0.005, horizon=65
    )


@pytest.fixture(scope='session')
def localized_params() -> TheoryParams:
    return TheoryParams(
        lam=30, mu=50, d0_surge=1000, d0_nonsurge=200, k=0.001, horizon=65
    )


@pytest.fixture(scope='session')
def inversion_params() -> TheoryParams:
    return TheoryParams(lam=30, mu=50, d0_surge=1000, d0_nonsurge=300, k=0.05)


@pytest.fixture(scope='session')
def small_agent_params() -> AgentParams:
    return AgentParams(
        lam=3,
        mu=5,
        d0_surge=60,
        d0_nonsurge=10,
        seed=7,
        cost_dist=TruncatedNormalSpec(mean=2.0, std=1.0)
    )


@pytest.fixture(scope='session')
def scenarios_dir() -> Path:
    return SCENARIOS_DIR
