import pytest

from pathlib import Path
from typing import Callable

SPILL_OVER_SCENARIO = '''
name = "spill-over"
model = "theory"
lambda = 30
mu = 50
d0_surge = 1000
d0_nonsurge = 200
k = 0.005
horizon = 65
'''

SMALL_AGENT_SCENARIO = '''
name = "small-market"
model = "agent"
lambda = 3
mu = 5
d0_surge = 60
d0_nonsurge = 10
seed = 7

[cost_dist]
mean = 2.0
std = 1.0
'''


@pytest.fixture(scope='session')
def spill_over_text() -> str:
    return SPILL_OVER_SCENARIO


@pytest.fixture(scope='session')
def small_agent_text() -> str:
    return SMALL_AGENT_SCENARIO


@pytest.fixture(scope='function')
def write_scenario(tmp_path: Path) -> Callable[[str], Path]:
    def _write(text: str, name: str = 'scenario.toml') -> Path:
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return path

    return _write
