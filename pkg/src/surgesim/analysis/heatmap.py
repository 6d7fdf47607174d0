import logging
from concurrent.futures import Executor
from itertools import product
from typing import List, Optional, Sequence

import numpy as np

from ..logutils import logcontext
from ..market import AgentParams, TruncatedNormalSpec, simulate_market
from ..model import FrozenModel
from .compare import relative_difference

__all__ = [
    'HeatmapCell',
    'heatmap_cell',
    'heatmap',
]

logger = logging.getLogger(__name__)


class HeatmapCell(FrozenModel):
    """
    Price-gap improvement of strategic riders for one cost distribution.

    Attributes:
        d_mean (float): Mean of the move-cost distribution.
        d_std (float): Standard deviation of the move-cost distribution.
        rel_diff_pct (float): Seed-averaged relative difference of the time-averaged
            price gap, strategic versus benchmark, in percent.
        seeds (List[int]): Seeds the cell was averaged over.
    """
    d_mean: float
    d_std: float
    rel_diff_pct: float
    seeds: List[int]


def heatmap_cell(
        base_params: AgentParams,
        d_mean: float,
        d_std: float,
        horizon: int,
        seeds: Sequence[int]
) -> HeatmapCell:
    """
    Runs the strategic model and its benchmark for every seed over the full horizon
    and averages the relative gap difference.
    """
    with logcontext() as lc:
        lc.set(d_mean=d_mean, d_std=d_std)
        diffs = []
        for seed in seeds:
            params = base_params.model_copy(
                update=dict(
                    cost_dist=TruncatedNormalSpec(mean=d_mean, std=d_std),
                    horizon=horizon,
                    seed=seed,
                    stop_on_clear=False
                )
            )
            strategic = simulate_market(params.model_copy(update=dict(strategic=True)))
            benchmark = simulate_market(params.model_copy(update=dict(strategic=False)))
            diffs.append(relative_difference(strategic.mean_delta_p, benchmark.mean_delta_p))

        cell = HeatmapCell(
            d_mean=d_mean, d_std=d_std, rel_diff_pct=float(np.mean(diffs)), seeds=list(seeds)
        )
        logger.info('heatmap cell', extra=dict(rel_diff_pct=cell.rel_diff_pct))
        return cell


def heatmap(
        base_params: AgentParams,
        d_mean_grid: Sequence[float],
        d_std_grid: Sequence[float],
        horizon: int = 500,
        seeds: Sequence[int] = range(5),
        executor: Optional[Executor] = None
) -> List[List[HeatmapCell]]:
    """
    Relative price-gap improvement over a grid of cost distributions.

    Cells are independent; with an `executor` they run concurrently and are collected
    back into their grid position, so the result does not depend on completion order.

    Returns:
        Rows indexed by `d_mean_grid`, columns by `d_std_grid`.
    """
    if not d_mean_grid or not d_std_grid:
        raise ValueError('requires non-empty d_mean and d_std grids')

    coordinates = list(product(d_mean_grid, d_std_grid))
    task_args = (
        [base_params] * len(coordinates),
        [mean for mean, _ in coordinates],
        [std for _, std in coordinates],
        [horizon] * len(coordinates),
        [list(seeds)] * len(coordinates)
    )
    cells = list(executor.map(heatmap_cell, *task_args)) if executor else list(
        map(heatmap_cell, *task_args)
    )
    width = len(d_std_grid)
    return [cells[row * width:(row + 1) * width] for row in range(len(d_mean_grid))]
