"""
Platform pricing and the agents' choice rules.

The platform sets the price gap so that the demand-to-supply ratio, a proxy for wait
time, is the same in both zones. With drivers choosing a zone by a two-alternative
logit with sensitivity ``beta``, the expected driver ratio is ``exp(beta * gap)``
and equating it to the demand ratio gives::

    gap = log(D_s / D_ns) / beta

The gap is zero once total unmet demand falls below the total supply of a step,
never negative, and capped so that the surge price stays at or below ``cap``.
"""
import math
from typing import Self, Tuple

import numpy as np
from pydantic import Field, model_validator
from scipy.special import expit

from ..model import FrozenModel

__all__ = [
    'PricingConfig',
    'price_gap',
    'zone_prices',
    'driver_split',
    'rider_moves',
    'movers_mask',
]


class PricingConfig(FrozenModel):
    """
    Attributes:
        logit_sensitivity (float): ``beta`` of the drivers' logit choice. Zero means
            drivers ignore prices and split evenly.
        base_price (float): Non-surge price multiplier ``P_ns``.
        cap (float): Maximum surge price ``M``.
    """
    logit_sensitivity: float = Field(0.25, ge=0)
    base_price: float = Field(1.0, ge=0)
    cap: float = 10.0

    @model_validator(mode='after')
    def validate_cap(self) -> Self:
        if self.cap < self.base_price:
            raise ValueError('requires cap >= base_price')

        return self

    @property
    def max_gap(self) -> float:
        return self.cap - self.base_price


def price_gap(
        d_s: int | float,
        d_ns: int | float,
        cfg: PricingConfig,
        total_supply_per_step: int | float
) -> float:
    """
    Equilibrium price gap ``P_s - P_ns`` for the current unmet demands.

    Args:
        d_s: Unmet surge demand.
        d_ns: Unmet non-surge demand.
        cfg: Pricing configuration.
        total_supply_per_step: Drivers expected per step over both zones (``2 * mu``).

    Returns:
        The gap, within ``[0, cap - base_price]``.
    """
    if d_s + d_ns < total_supply_per_step or d_s <= 0 or d_s <= d_ns:
        return 0.0
    if d_ns <= 0 or cfg.logit_sensitivity == 0:
        return cfg.max_gap

    gap = math.log(d_s / d_ns) / cfg.logit_sensitivity
    return min(cfg.max_gap, max(0.0, gap))


def zone_prices(delta_p: float, cfg: PricingConfig) -> Tuple[float, float]:
    """Returns ``(p_s, p_ns)`` for a gap; the non-surge zone is pinned at the base price."""
    return min(cfg.cap, cfg.base_price + delta_p), cfg.base_price


def driver_split(p_s: float, p_ns: float, beta: float) -> Tuple[float, float]:
    """
    Logit probabilities ``(gamma_s, gamma_ns)`` that a driver serves each zone.
    """
    x = beta * (p_s - p_ns)
    return float(expit(x)), float(expit(-x))


def rider_moves(move_cost: float, delta_p: float, strategic: bool = True) -> bool:
    """A strategic surge rider walks iff walking costs no more than the gap it saves."""
    return strategic and move_cost <= delta_p


def movers_mask(move_costs: np.ndarray, delta_p: float, strategic: bool = True) -> np.ndarray:
    """Vectorized `rider_moves` over a zone's waiting riders."""
    if not strategic:
        return np.zeros(move_costs.shape, dtype=bool)

    return move_costs <= delta_p
