import math
from pathlib import Path

from hypothesis import strategies as st

from surgesim.dynamics import TheoryParams
from surgesim.market import AgentParams, PricingConfig, TruncatedNormalSpec

from typing import List

__all__ = [
    'SCENARIOS_DIR',
    'MAX_CLEARING_STEPS',
    'scenario_paths',
    'theory_params',
    'agent_params',
]

SCENARIOS_DIR = Path(__file__).parents[2] / 'scenarios'

# keeps randomized fluid runs short enough for property suites
MAX_CLEARING_STEPS = 2000


def scenario_paths() -> List[Path]:
    return sorted(SCENARIOS_DIR.glob('*.toml'))


@st.composite
def theory_params(draw: st.DrawFn, max_d0_surge: int = 10 ** 5) -> TheoryParams:
    """
    Valid fluid parameters: log-uniform integer surge demand, integer rates, and a
    multiplier small enough that the move fraction never saturates.
    """
    d0_surge = int(round(10 ** draw(st.floats(1.0, math.log10(max_d0_surge)))))
    d0_nonsurge = draw(st.integers(0, d0_surge))
    lam = draw(st.integers(0, 200))
    min_excess = max(1, math.ceil((d0_surge + d0_nonsurge) / MAX_CLEARING_STEPS))
    mu = lam + draw(st.integers(min_excess, max(min_excess, 100)))
    k = draw(
        st.floats(
            min_value=0.0, max_value=mu / d0_surge, allow_nan=False, allow_subnormal=False
        )
    )
    return TheoryParams(
        lam=lam, mu=mu, d0_surge=d0_surge, d0_nonsurge=d0_nonsurge, k=k
    )


@st.composite
def agent_params(draw: st.DrawFn, horizon: int = 30) -> AgentParams:
    """Small agent markets that run in a few milliseconds."""
    lam = draw(st.integers(0, 5))
    mu = lam + draw(st.integers(1, 5))
    d0_surge = draw(st.integers(0, 80))
    return AgentParams(
        lam=lam,
        mu=mu,
        d0_surge=d0_surge,
        d0_nonsurge=draw(st.integers(0, d0_surge)),
        horizon=horizon,
        seed=draw(st.integers(0, 2 ** 32)),
        cost_dist=TruncatedNormalSpec(
            mean=draw(st.floats(0.0, 15.0)), std=draw(st.floats(0.5, 8.0))
        ),
        pricing=PricingConfig(logit_sensitivity=draw(st.floats(0.05, 1.0)))
    )
