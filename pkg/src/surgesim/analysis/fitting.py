"""
Calibration of the fluid model's move-rate multiplier ``k`` against observed demand
curves (typically an agent-based run).

The objective is the summed squared difference of both zones' demand curves after
aligning them on ``t`` and zero-padding the shorter one up to the common length. It
is evaluated on a uniform grid over ``k_range`` and the best grid cell is then
refined by golden-section search between its neighbours.
"""
import logging
import math
from typing import Callable, List, Self, Sequence, Tuple

import numpy as np
from pydantic import Field, model_validator

from ..dynamics import TheoryParams, Trajectory, simulate
from ..errors import NotConvergedError
from ..market import AgentParams, MarketRun, simulate_market
from ..model import FrozenModel

__all__ = [
    'FitPoint',
    'FitResult',
    'align_curves',
    'golden_section_minimize',
    'theory_params_for',
    'curve_objective',
    'fit_k',
    'fit_k_market',
]

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2


class FitPoint(FrozenModel):
    k: float
    objective: float = Field(ge=0)


class FitResult(FrozenModel):
    """
    Attributes:
        k_star (float): Best multiplier found.
        objective (float): Objective value at ``k_star``.
        grid (List[FitPoint]): Every grid point evaluated, in increasing ``k``.
    """
    k_star: float
    objective: float = Field(ge=0)
    grid: List[FitPoint]

    @model_validator(mode='after')
    def validate_k_star(self) -> Self:
        if self.grid and not (self.grid[0].k <= self.k_star <= self.grid[-1].k):
            raise ValueError('requires k_star within the grid range')

        return self


def align_curves(*curves: Sequence[float]) -> List[np.ndarray]:
    """Zero-pads every curve to the length of the longest one."""
    length = max(len(curve) for curve in curves)
    return [
        np.pad(np.asarray(curve, dtype=float), (0, length - len(curve)))
        for curve in curves
    ]


def golden_section_minimize(
        f: Callable[[float], float], a: float, b: float, tol: float = 1e-8
) -> Tuple[float, float]:
    """
    Golden-section search for a minimum of `f` on ``[a, b]``.

    Returns:
        The abscissa of the best point evaluated and its value.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = (a + b) / 2
        return x, f(x)

    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c, d = a + INV_PHI_SQUARE * h, a + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(steps - 1):
        h *= INV_PHI
        if yc < yd:
            d, yd = c, yc
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c, yc = d, yd
            d = a + INV_PHI * h
            yd = f(d)

    return (c, yc) if yc < yd else (d, yd)


def theory_params_for(params: AgentParams, k: float) -> TheoryParams:
    """Fluid-model counterpart of an agent configuration."""
    return TheoryParams(
        lam=params.lam,
        mu=params.mu,
        d0_surge=params.d0_surge,
        d0_nonsurge=params.d0_nonsurge,
        k=k
    )


def _observed_curves(observed: MarketRun | Trajectory) -> Tuple[List[float], List[float]]:
    if not observed.converged:
        raise NotConvergedError('cannot fit k against a run that did not converge')

    return list(map(float, observed.d_s)), list(map(float, observed.d_ns))


def curve_objective(
        base_params: TheoryParams, observed_s: Sequence[float], observed_ns: Sequence[float]
) -> Callable[[float], float]:
    """Squared curve distance between the observation and the fluid model at a given k."""
    def objective(k: float) -> float:
        theory = simulate(base_params.model_copy(update=dict(k=k)))
        th_s, th_ns, obs_s, obs_ns = align_curves(
            theory.d_s, theory.d_ns, observed_s, observed_ns
        )
        return float(np.sum((th_s - obs_s) ** 2) + np.sum((th_ns - obs_ns) ** 2))

    return objective


def fit_k(
        observed: MarketRun | Trajectory,
        base_params: TheoryParams,
        k_range: Tuple[float, float] = (1e-4, 1e-2),
        grid_size: int = 50
) -> FitResult:
    """
    Fits ``k`` so the fluid model reproduces the observed demand curves.

    Args:
        observed: A converged agent run or fluid trajectory.
        base_params: Fluid parameters; their ``k`` is ignored.
        k_range: Positive interval searched.
        grid_size: Number of uniform grid points, at least 2.

    Raises:
        NotConvergedError: If `observed` did not converge.
        ValueError: If the range or grid size is invalid.
    """
    k_lo, k_hi = k_range
    if not (0 <= k_lo < k_hi) or grid_size < 2:
        raise ValueError('requires 0 <= k_min < k_max and grid_size >= 2')

    objective = curve_objective(base_params, *_observed_curves(observed))
    grid = [
        FitPoint(k=float(k), objective=objective(float(k)))
        for k in np.linspace(k_lo, k_hi, grid_size)
    ]
    best = min(range(grid_size), key=lambda i: grid[i].objective)
    k_star, value = golden_section_minimize(
        objective,
        grid[max(0, best - 1)].k,
        grid[min(grid_size - 1, best + 1)].k,
        tol=(k_hi - k_lo) * 1e-6
    )
    if value > grid[best].objective:
        k_star, value = grid[best].k, grid[best].objective

    logger.info('fitted k', extra=dict(k_star=k_star, objective=value))
    return FitResult(k_star=k_star, objective=value, grid=grid)


def fit_k_market(
        params: AgentParams,
        seeds: Sequence[int],
        k_range: Tuple[float, float] = (1e-4, 1e-2),
        grid_size: int = 50
) -> List[FitResult]:
    """Fits ``k`` against one strategic agent run per seed."""
    base = theory_params_for(params, 0.0)
    return [
        fit_k(
            simulate_market(params.model_copy(update=dict(seed=seed, strategic=True))),
            base, k_range, grid_size
        )
        for seed in seeds
    ]
