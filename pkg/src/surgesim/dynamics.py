"""
Deterministic fluid model of surge dissipation across two zones.

A surge zone starts with an abnormally large unmet demand ``D0`` and a surrounding
non-surge zone with a usual unmet demand ``d0``. In every time step both zones
receive ``lambda`` new riders and ``mu`` drivers, and a fraction
``f(D_s - D_ns)`` of the riders waiting in the surge zone walk across the boundary::

    phi(t)     = f(D_s(t) - D_ns(t)) * D_s(t)
    D_s(t+1)   = max(0, D_s(t) + (lambda - mu) - phi(t))
    D_ns(t+1)  = max(0, D_ns(t) + (lambda - mu) + phi(t))

with ``f(x) = min(1, max(0, k * x / mu))``.

Besides the recursion this module detects the events of a trajectory (convergence
times, the non-surge peak, surge inversion), classifies the surge as localized or
spill-over, and computes the closed-form windows that the convergence times must
fall in.
"""
import logging
import math
from enum import StrEnum
from typing import List, Optional, Self, Tuple

from pydantic import Field, model_validator

from .errors import NotConvergedError
from .iter import first_index, settled_index
from .model import FrozenModel, Window

__all__ = [
    'TheoryParams',
    'DemandState',
    'Trajectory',
    'SurgeType',
    'BoundsReport',
    'DEFAULT_TOL',
    'default_horizon',
    'move_fraction',
    'walking_mass',
    'advance',
    'step',
    'simulate',
    'convergence_times',
    'step_counts',
    'peak_time',
    'tau_s_bounds',
    'tau_n_bounds',
    'clearing_bound',
    'classify_surge',
    'detect_inversion',
]

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9

# a zone with less than one waiting rider reads as empty on a demand curve
RIDER_THRESHOLD = 1.0


def default_horizon(d0_surge: float, d0_nonsurge: float, lam: float, mu: float) -> int:
    """Ten times the step count within which total demand is guaranteed to clear."""
    return max(1, 10 * math.ceil((d0_surge + d0_nonsurge) / (mu - lam)))


class SurgeType(StrEnum):
    LOCALIZED = 'localized'
    SPILL_OVER = 'spill_over'


class TheoryParams(FrozenModel):
    """
    Parameters of the fluid model.

    Attributes:
        lam (float): Riders arriving per time step in each zone (``lambda`` in files).
        mu (float): Drivers arriving per time step in each zone.
        d0_surge (float): Initial unmet surge demand ``D0``.
        d0_nonsurge (float): Initial unmet non-surge demand ``d0``.
        k (float): Move-rate multiplier of the linear move fraction.
        horizon (int): Maximum number of steps; defaults to
            ``10 * ceil((D0 + d0) / (mu - lambda))``.
        tol (float): Demands at or below this value count as zero.
    """
    lam: float = Field(alias='lambda', ge=0)
    mu: float = Field(ge=0)
    d0_surge: float = Field(ge=0)
    d0_nonsurge: float = Field(ge=0)
    k: float = Field(ge=0)
    horizon: int = Field(ge=1)
    tol: float = Field(DEFAULT_TOL, ge=0)

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
    def excess_supply(self) -> float:
        """Per-zone excess supply ``mu - lambda``."""
        return self.mu - self.lam


class DemandState(FrozenModel):
    t: int = Field(ge=0)
    d_s: float = Field(ge=0)
    d_ns: float = Field(ge=0)

    @property
    def total(self) -> float:
        return self.d_s + self.d_ns


class Trajectory(FrozenModel):
    """
    States from the boundary conditions up to convergence or the horizon.

    Attributes:
        params (TheoryParams): Parameters the trajectory was generated with.
        states (List[DemandState]): One state per step, ``states[i].t == i``.
        converged (bool): Whether both demands reached zero before the horizon.
        seed (Optional[int]): Master seed, for stochastic trajectories.
    """
    params: TheoryParams
    states: List[DemandState]
    converged: bool
    seed: Optional[int] = None

    @model_validator(mode='after')
    def validate_states(self) -> Self:
        if not self.states:
            raise ValueError('requires at least the initial state')
        if any(state.t != index for index, state in enumerate(self.states)):
            raise ValueError('requires consecutive time steps starting at 0')

        return self

    @property
    def d_s(self) -> List[float]:
        return [state.d_s for state in self.states]

    @property
    def d_ns(self) -> List[float]:
        return [state.d_ns for state in self.states]

    @property
    def final(self) -> DemandState:
        return self.states[-1]


class BoundsReport(FrozenModel):
    """
    Observed event times of a converged run next to their theoretical windows.

    Attributes:
        tau_s_bounds (Window[int]): Window for the surge convergence time.
        tau_n_bounds (Window[int]): Window for the non-surge convergence time.
        tau_s_observed (int): First step from which the surge demand stays at zero.
        tau_n_observed (int): First step from which the non-surge demand stays at zero.
        tau_s_steps (int): Surge convergence as a 1-based step count, see `step_counts`.
        tau_n_steps (int): Non-surge convergence as a 1-based step count.
        peak_tau_observed (int): First step whose walking mass is at most ``mu - lambda``.
        surge_type (SurgeType): Localized or spill-over, from the initial conditions.
        inversion_time (Optional[int]): First step with ``D_ns > D_s``, if any.
        clearing_bound (int): Steps within which total demand must reach zero.
        clearing_time (int): Step at which total demand reached zero.
        violations (List[str]): Every property the run failed; empty for a valid run.
    """
    tau_s_bounds: Window[int]
    tau_n_bounds: Window[int]
    tau_s_observed: int
    tau_n_observed: int
    tau_s_steps: int
    tau_n_steps: int
    peak_tau_observed: int
    surge_type: SurgeType
    inversion_time: Optional[int] = None
    clearing_bound: int
    clearing_time: int
    violations: List[str] = []

    @property
    def ok(self) -> bool:
        return not self.violations


def move_fraction(x: float, params: TheoryParams) -> float:
    """
    Fraction of waiting surge riders that walk across the boundary in one step.

    Args:
        x (float): Demand differential ``D_s - D_ns``; nonpositive values yield 0.
        params (TheoryParams): Model parameters providing ``k`` and ``mu``.

    Returns:
        float: ``min(1, max(0, k * x / mu))``.
    """
    if x <= 0 or params.k == 0:
        return 0.0

    return min(1.0, params.k * x / params.mu)


def walking_mass(d_s: float, d_ns: float, params: TheoryParams) -> float:
    """Riders walking out of the surge zone in a step that starts at ``(d_s, d_ns)``."""
    return move_fraction(d_s - d_ns, params) * d_s


def advance(
        state: DemandState,
        inflow_s: float,
        inflow_ns: float,
        params: TheoryParams
) -> DemandState:
    """
    One step of the recursion with explicit per-zone net inflows.

    The deterministic model passes ``lambda - mu`` for both zones; the stochastic
    extension passes the sampled arrivals minus the sampled supply. Results at or
    below ``params.tol`` are snapped to zero so that zero stays absorbing.
    """
    moved = walking_mass(state.d_s, state.d_ns, params)
    d_s = max(0.0, state.d_s + inflow_s - moved)
    d_ns = max(0.0, state.d_ns + inflow_ns + moved)
    return DemandState(
        t=state.t + 1,
        d_s=d_s if d_s > params.tol else 0.0,
        d_ns=d_ns if d_ns > params.tol else 0.0
    )


def step(state: DemandState, params: TheoryParams) -> DemandState:
    inflow = params.lam - params.mu
    return advance(state, inflow, inflow, params)


def initial_state(params: TheoryParams) -> DemandState:
    return DemandState(t=0, d_s=params.d0_surge, d_ns=params.d0_nonsurge)


def _is_cleared(state: DemandState, tol: float) -> bool:
    return state.d_s <= tol and state.d_ns <= tol


def simulate(params: TheoryParams) -> Trajectory:
    """
    Iterates `step` from the boundary conditions until both demands are zero or the
    horizon is reached. Exhausting the horizon is reported through ``converged``.
    """
    state = initial_state(params)
    states = [state]
    while not _is_cleared(state, params.tol) and state.t < params.horizon:
        state = step(state, params)
        states.append(state)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug('step', extra=dict(t=state.t, d_s=state.d_s, d_ns=state.d_ns))

    converged = _is_cleared(state, params.tol)
    if not converged:
        logger.warning(
            'theory run did not converge',
            extra=dict(horizon=params.horizon, d_s=state.d_s, d_ns=state.d_ns)
        )

    return Trajectory(params=params, states=states, converged=converged)


def convergence_times(traj: Trajectory) -> Tuple[int, int]:
    """
    Returns ``(tau_s, tau_n)``: for each zone, the first step from which its unmet
    demand stays at or below the zero tolerance.

    Raises:
        NotConvergedError: If the trajectory exhausted its horizon.
    """
    if not traj.converged:
        raise NotConvergedError(
            f"trajectory did not converge within horizon={traj.params.horizon}",
            horizon=traj.params.horizon
        )

    tol = traj.params.tol
    return (
        settled_index(traj.d_s, lambda value: value <= tol),
        settled_index(traj.d_ns, lambda value: value <= tol)
    )


def step_counts(traj: Trajectory) -> Tuple[int, int]:
    """
    Convergence times counted the way they are read off a plotted demand curve: the
    1-based position of the first step from which less than one rider waits.

    The counts usually exceed `convergence_times` by one; they agree when a residue
    below one rider is left over in the step before the zone clears.

    Raises:
        NotConvergedError: If the trajectory exhausted its horizon.
    """
    if not traj.converged:
        raise NotConvergedError(
            f"trajectory did not converge within horizon={traj.params.horizon}",
            horizon=traj.params.horizon
        )

    return (
        settled_index(traj.d_s, lambda value: value < RIDER_THRESHOLD) + 1,
        settled_index(traj.d_ns, lambda value: value < RIDER_THRESHOLD) + 1
    )


def peak_time(traj: Trajectory, params: TheoryParams) -> int:
    """
    First step whose walking mass is at most ``mu - lambda``: the non-surge demand
    rises strictly before it and never rises again after it.

    Raises:
        NotConvergedError: If no step of a non-converged trajectory qualifies.
    """
    tau = first_index(
        traj.states,
        lambda state: walking_mass(state.d_s, state.d_ns, params) <= params.excess_supply
    )
    if tau is None:
        raise NotConvergedError(
            'peak time not reached within the trajectory', horizon=params.horizon
        )

    return tau


def tau_s_bounds(params: TheoryParams) -> Tuple[int, int]:
    d0 = params.d0_surge
    fastest = params.excess_supply + walking_mass(d0, 0.0, params)
    return (
        math.floor(d0 / fastest),
        math.ceil(d0 / params.excess_supply)
    )


def tau_n_bounds(params: TheoryParams) -> Tuple[int, int]:
    return (
        math.floor(params.d0_nonsurge / params.excess_supply),
        clearing_bound(params)
    )


def clearing_bound(params: TheoryParams) -> int:
    """Steps within which the total unmet demand is guaranteed to reach zero."""
    return math.ceil((params.d0_surge + params.d0_nonsurge) / params.excess_supply)


def classify_surge(params: TheoryParams) -> SurgeType:
    """
    A surge stays localized iff the riders walking in the first step can be absorbed
    by the non-surge excess supply: ``D0 * f(D0 - d0) <= mu - lambda``.
    """
    if walking_mass(params.d0_surge, params.d0_nonsurge, params) <= params.excess_supply:
        return SurgeType.LOCALIZED

    return SurgeType.SPILL_OVER


def detect_inversion(traj: Trajectory) -> Optional[int]:
    """First step at which the non-surge demand exceeds the surge demand, if any."""
    return first_index(traj.states, lambda state: state.d_ns > state.d_s)
