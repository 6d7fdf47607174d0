"""
Stochastic extension of the fluid model.

Per step and per zone, the deterministic rates ``lambda`` and ``mu`` are replaced by
independent arrival counts. Each (zone, flow) pair draws from its own random stream
derived from the master seed, so runs are reproducible and streams never perturb
each other. Poisson variates come from numpy's generator, which uses inversion for
small means and Hörmann's transformed rejection (PTRS) for large ones.
"""
import logging
from enum import StrEnum
from typing import Dict, Self

import numpy as np
from pydantic import Field, model_validator

from .dynamics import DemandState, TheoryParams, Trajectory, advance, initial_state
from .model import FrozenModel
from .streams import MAX_SEED, spawn_streams

__all__ = [
    'ArrivalKind',
    'ArrivalProcess',
    'StochasticParams',
    'STREAM_NAMES',
    'sample_arrivals',
    'simulate_stochastic',
]

logger = logging.getLogger(__name__)

# Order is part of the reproducibility contract; append only.
STREAM_NAMES = ('demand_s', 'supply_s', 'demand_ns', 'supply_ns')


class ArrivalKind(StrEnum):
    DETERMINISTIC = 'deterministic'
    POISSON = 'poisson'


class ArrivalProcess(FrozenModel):
    """
    Attributes:
        kind (ArrivalKind): Distribution of the per-step count.
        mean (float): Mean arrivals per time step.
    """
    kind: ArrivalKind = ArrivalKind.POISSON
    mean: float = Field(ge=0)


class StochasticParams(FrozenModel):
    """
    Attributes:
        base (TheoryParams): Fluid-model parameters; the process means must match
            its ``lambda`` (demand) and ``mu`` (supply).
        demand_process (ArrivalProcess): Per-zone rider arrivals.
        supply_process (ArrivalProcess): Per-zone driver arrivals.
        seed (int): Master seed for all streams of the run.
    """
    base: TheoryParams
    demand_process: ArrivalProcess
    supply_process: ArrivalProcess
    seed: int = Field(0, ge=0, le=MAX_SEED)

    @model_validator(mode='after')
    def validate_means(self) -> Self:
        if self.demand_process.mean != self.base.lam:
            raise ValueError('requires demand_process.mean == lambda')
        if self.supply_process.mean != self.base.mu:
            raise ValueError('requires supply_process.mean == mu')

        return self

    @classmethod
    def poisson(cls, base: TheoryParams, seed: int = 0) -> Self:
        """Poisson demand and supply around the rates of `base`."""
        return cls(
            base=base,
            demand_process=ArrivalProcess(kind=ArrivalKind.POISSON, mean=base.lam),
            supply_process=ArrivalProcess(kind=ArrivalKind.POISSON, mean=base.mu),
            seed=seed
        )


def sample_arrivals(process: ArrivalProcess, rng: np.random.Generator) -> int:
    """
    Draws one per-step arrival count.

    Deterministic processes return ``round(mean)`` without touching `rng`.
    """
    if process.kind == ArrivalKind.DETERMINISTIC:
        return round(process.mean)

    return int(rng.poisson(process.mean))


def _net_inflows(
        params: StochasticParams, streams: Dict[str, np.random.Generator]
) -> tuple[int, int]:
    demand_s = sample_arrivals(params.demand_process, streams['demand_s'])
    supply_s = sample_arrivals(params.supply_process, streams['supply_s'])
    demand_ns = sample_arrivals(params.demand_process, streams['demand_ns'])
    supply_ns = sample_arrivals(params.supply_process, streams['supply_ns'])
    return demand_s - supply_s, demand_ns - supply_ns


def simulate_stochastic(params: StochasticParams) -> Trajectory:
    """
    Same loop as `dynamics.simulate` with the per-zone net inflow resampled every
    step. Equal parameters and seed yield identical trajectories.
    """
    base = params.base
    streams = spawn_streams(params.seed, STREAM_NAMES)
    state: DemandState = initial_state(base)
    states = [state]
    while not (state.d_s <= base.tol and state.d_ns <= base.tol) and state.t < base.horizon:
        inflow_s, inflow_ns = _net_inflows(params, streams)
        state = advance(state, inflow_s, inflow_ns, base)
        states.append(state)

    converged = state.d_s <= base.tol and state.d_ns <= base.tol
    if not converged:
        logger.warning(
            'stochastic run did not converge',
            extra=dict(seed=params.seed, horizon=base.horizon)
        )

    return Trajectory(params=base, states=states, converged=converged, seed=params.seed)
