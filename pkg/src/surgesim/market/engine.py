"""
Agent-based market with strategic riders and logit-choosing drivers.

One market step runs, in this order:

1. Price the step from the unmet demands at the end of the previous step.
2. Strategic surge riders whose move cost is at most the price gap walk to the
   non-surge zone, keeping their place in the FIFO order.
3. New riders arrive in each zone (Poisson ``lambda``) with fresh willingness-to-pay
   and move-cost draws.
4. Poisson ``2 * mu`` drivers arrive and each picks a zone by the logit split: driver
   ``i`` serves the surge zone when its uniform draw falls below ``gamma_s``.
5. In each zone, riders willing to pay the zone price are matched oldest first until
   drivers or eligible riders run out. Unmatched drivers leave.
6. The step is recorded.

Every random source (arrivals per zone, rider attributes per zone, driver arrivals,
driver choices) owns its own stream, so a strategic run and its non-strategic
benchmark consume identical random numbers under the same seed. Driver choice draws
one uniform per driver, so the same drivers face the same draws in both runs and a
lower surge share never sends more drivers to the surge zone.
"""
import logging
from typing import Dict, List, NamedTuple, Optional, Self

import numpy as np
from pydantic import Field, model_validator

from ..dynamics import default_horizon
from ..iter import first_index
from ..model import FrozenModel
from ..streams import MAX_SEED, spawn_streams
from .pricing import PricingConfig, driver_split, movers_mask, price_gap, zone_prices
from .riders import RiderPool, TruncatedNormalSpec

__all__ = [
    'AgentParams',
    'MarketState',
    'MarketStepRecord',
    'MarketRun',
    'STREAM_NAMES',
    'initial_market',
    'market_step',
    'simulate_market',
]

logger = logging.getLogger(__name__)

# Order is part of the reproducibility contract; append only.
STREAM_NAMES = (
    'arrivals_s', 'arrivals_ns', 'riders_s', 'riders_ns', 'drivers', 'driver_choice'
)


class AgentParams(FrozenModel):
    """
    Configuration of an agent-based run.

    Attributes:
        lam (int | float): Mean rider arrivals per step in each zone (``lambda`` in files).
        mu (int | float): Mean drivers per step in each zone; ``2 * mu`` arrive in total.
        d0_surge (int): Riders initially waiting in the surge zone.
        d0_nonsurge (int): Riders initially waiting in the non-surge zone.
        horizon (int): Maximum number of steps.
        seed (int): Master seed.
        cost_dist (TruncatedNormalSpec): Move-cost distribution.
        wtp_dist (TruncatedNormalSpec): Willingness-to-pay distribution.
        pricing (PricingConfig): Platform pricing.
        strategic (bool): False runs the non-strategic benchmark: riders never move.
        stop_on_clear (bool): Stop as soon as total unmet demand drops below ``2 * mu``;
            False runs the full horizon.
    """
    lam: float = Field(alias='lambda', ge=0)
    mu: float = Field(ge=0)
    d0_surge: int = Field(ge=0)
    d0_nonsurge: int = Field(ge=0)
    horizon: int = Field(ge=1)
    seed: int = Field(0, ge=0, le=MAX_SEED)
    cost_dist: TruncatedNormalSpec
    wtp_dist: TruncatedNormalSpec = TruncatedNormalSpec(mean=7.0, std=2.0)
    pricing: PricingConfig = PricingConfig()
    strategic: bool = True
    stop_on_clear: bool = True

    @model_validator(mode='before')
    @classmethod
    def fill_horizon(cls, data):
        if not isinstance(data, dict) or data.get('horizon') is not None:
            return data

        try:
            lam, mu = float(data.get('lambda', data.get('lam'))), float(data['mu'])
            d0_surge, d0_nonsurge = float(data['d0_surge']), float(data['d0_nonsurge'])
        except (KeyError, TypeError, ValueError):
            return data

        # the default horizon is only defined for a draining market
        if mu <= lam:
            raise ValueError('requires lambda < mu')

        return dict(data, horizon=default_horizon(d0_surge, d0_nonsurge, lam, mu))

    @model_validator(mode='after')
    def validate_market(self) -> Self:
        if self.mu <= self.lam:
            raise ValueError('requires lambda < mu')
        if self.d0_surge < self.d0_nonsurge:
            raise ValueError('requires d0_surge >= d0_nonsurge')

        return self

    @property
    def total_supply(self) -> float:
        return 2 * self.mu


class MarketState(NamedTuple):
    t: int
    surge: RiderPool
    nonsurge: RiderPool
    next_id: int

    @property
    def d_s(self) -> int:
        return len(self.surge)

    @property
    def d_ns(self) -> int:
        return len(self.nonsurge)


class MarketStepRecord(FrozenModel):
    """
    Outcome of one market step; the record at ``t = 0`` holds the initial counts.

    Attributes:
        t (int): Step index.
        d_s (int): Unmet surge demand at the end of the step.
        d_ns (int): Unmet non-surge demand at the end of the step.
        p_s (float): Surge price used during the step.
        p_ns (float): Non-surge price used during the step.
        delta_p (float): Price gap ``p_s - p_ns``.
        gamma_s (float): Probability that an arriving driver served the surge zone.
        gamma_ns (float): Probability that an arriving driver served the non-surge zone.
        r_s (int): Drivers that went to the surge zone.
        r_ns (int): Drivers that went to the non-surge zone.
        moved (int): Riders that walked out of the surge zone.
        arrived_s (int): New surge riders.
        arrived_ns (int): New non-surge riders.
        matched_s (int): Completed surge rides.
        matched_ns (int): Completed non-surge rides.
    """
    t: int = Field(ge=0)
    d_s: int = Field(ge=0)
    d_ns: int = Field(ge=0)
    p_s: float
    p_ns: float
    delta_p: float = Field(ge=0)
    gamma_s: float = Field(ge=0, le=1)
    gamma_ns: float = Field(ge=0, le=1)
    r_s: int = Field(0, ge=0)
    r_ns: int = Field(0, ge=0)
    moved: int = Field(0, ge=0)
    arrived_s: int = Field(0, ge=0)
    arrived_ns: int = Field(0, ge=0)
    matched_s: int = Field(0, ge=0)
    matched_ns: int = Field(0, ge=0)


class MarketRun(FrozenModel):
    """
    Records of a market simulation.

    Attributes:
        params (AgentParams): Parameters of the run.
        records (List[MarketStepRecord]): One record per step, starting at ``t = 0``.
        converged (bool): Whether total unmet demand dropped below ``2 * mu``.
        convergence_time (Optional[int]): First step at which it did.
    """
    params: AgentParams
    records: List[MarketStepRecord]
    converged: bool
    convergence_time: Optional[int] = None

    @property
    def d_s(self) -> List[int]:
        return [record.d_s for record in self.records]

    @property
    def d_ns(self) -> List[int]:
        return [record.d_ns for record in self.records]

    @property
    def delta_p(self) -> List[float]:
        return [record.delta_p for record in self.records]

    @property
    def mean_delta_p(self) -> float:
        """Time average of the gap over the simulated steps (``t >= 1``)."""
        steps = self.records[1:]
        return float(np.mean([record.delta_p for record in steps])) if steps else 0.0

    @property
    def max_delta_p(self) -> float:
        return max(self.delta_p)

    @property
    def total_moved(self) -> int:
        return sum(record.moved for record in self.records)


class _Pricing(NamedTuple):
    delta_p: float
    p_s: float
    p_ns: float
    gamma_s: float
    gamma_ns: float


def _price(d_s: int, d_ns: int, params: AgentParams) -> _Pricing:
    cfg = params.pricing
    delta_p = price_gap(d_s, d_ns, cfg, params.total_supply)
    p_s, p_ns = zone_prices(delta_p, cfg)
    gamma_s, gamma_ns = driver_split(p_s, p_ns, cfg.logit_sensitivity)
    return _Pricing(delta_p, p_s, p_ns, gamma_s, gamma_ns)


def _new_riders(
        params: AgentParams,
        rng: np.random.Generator,
        first_id: int,
        count: int,
        t: int
) -> RiderPool:
    wtp = params.wtp_dist.sample(rng, count)
    move_cost = params.cost_dist.sample(rng, count)
    return RiderPool.arrivals(first_id, count, t, wtp, move_cost)


def initial_market(
        params: AgentParams, streams: Dict[str, np.random.Generator]
) -> tuple[MarketState, MarketStepRecord]:
    """Initial rider populations and the ``t = 0`` record."""
    surge = _new_riders(params, streams['riders_s'], 0, params.d0_surge, 0)
    nonsurge = _new_riders(
        params, streams['riders_ns'], params.d0_surge, params.d0_nonsurge, 0
    )
    state = MarketState(
        t=0, surge=surge, nonsurge=nonsurge, next_id=params.d0_surge + params.d0_nonsurge
    )
    record = MarketStepRecord(
        t=0, d_s=state.d_s, d_ns=state.d_ns,
        **_price(state.d_s, state.d_ns, params)._asdict()
    )
    return state, record


def market_step(
        state: MarketState,
        params: AgentParams,
        streams: Dict[str, np.random.Generator]
) -> tuple[MarketState, MarketStepRecord]:
    """Advances the market by one step; see the module documentation for the order."""
    t = state.t + 1
    pricing = _price(state.d_s, state.d_ns, params)
    delta_p, p_s, p_ns = pricing.delta_p, pricing.p_s, pricing.p_ns

    movers, surge = state.surge.split(
        movers_mask(state.surge.move_cost, delta_p, params.strategic)
    )
    nonsurge = state.nonsurge.merge(movers) if len(movers) else state.nonsurge

    next_id = state.next_id
    arrived_s = int(streams['arrivals_s'].poisson(params.lam))
    surge = surge.extend(_new_riders(params, streams['riders_s'], next_id, arrived_s, t))
    next_id += arrived_s
    arrived_ns = int(streams['arrivals_ns'].poisson(params.lam))
    nonsurge = nonsurge.extend(
        _new_riders(params, streams['riders_ns'], next_id, arrived_ns, t)
    )
    next_id += arrived_ns

    drivers = int(streams['drivers'].poisson(params.total_supply))
    r_s = int(np.count_nonzero(streams['driver_choice'].random(drivers) < pricing.gamma_s))
    r_ns = drivers - r_s

    matched_s, surge = surge.match(p_s, r_s)
    matched_ns, nonsurge = nonsurge.match(p_ns, r_ns)

    record = MarketStepRecord(
        t=t, d_s=len(surge), d_ns=len(nonsurge),
        **pricing._asdict(),
        r_s=r_s, r_ns=r_ns, moved=len(movers),
        arrived_s=arrived_s, arrived_ns=arrived_ns,
        matched_s=matched_s, matched_ns=matched_ns
    )
    logger.debug(
        'market step',
        extra=dict(t=t, d_s=record.d_s, d_ns=record.d_ns, delta_p=delta_p, moved=record.moved)
    )
    return MarketState(t=t, surge=surge, nonsurge=nonsurge, next_id=next_id), record


def _is_cleared(record: MarketStepRecord, params: AgentParams) -> bool:
    return record.d_s + record.d_ns < params.total_supply


def simulate_market(params: AgentParams) -> MarketRun:
    """
    Runs market steps until total unmet demand drops below ``2 * mu`` (unless
    ``stop_on_clear`` is off) or the horizon is reached. Deterministic given the seed.
    """
    streams = spawn_streams(params.seed, STREAM_NAMES)
    state, record = initial_market(params, streams)
    records = [record]
    while state.t < params.horizon:
        if params.stop_on_clear and _is_cleared(record, params):
            break
        state, record = market_step(state, params, streams)
        records.append(record)

    convergence_time = first_index(records, lambda r: _is_cleared(r, params))
    converged = convergence_time is not None
    if not converged:
        logger.warning(
            'market run did not clear',
            extra=dict(seed=params.seed, horizon=params.horizon, strategic=params.strategic)
        )

    return MarketRun(
        params=params, records=records, converged=converged,
        convergence_time=convergence_time
    )
