import pytest

from surgesim.harness import Scenario, load_scenario
from surgesim_test import SCENARIOS_DIR


@pytest.fixture(scope='session')
def agent_strategic_scenario() -> Scenario:
    return load_scenario(SCENARIOS_DIR / 'agent_strategic.toml')


@pytest.fixture(scope='session')
def agent_fit_scenario() -> Scenario:
    return load_scenario(SCENARIOS_DIR / 'agent_fit_k.toml')


@pytest.fixture(scope='session')
def agent_heatmap_scenario() -> Scenario:
    return load_scenario(SCENARIOS_DIR / 'agent_cost_heatmap.toml')
