import math
from typing import Optional

from ..market import AgentParams, MarketRun, simulate_market
from ..model import FrozenModel

__all__ = [
    'MarketSummary',
    'ModelComparison',
    'summarize',
    'relative_difference',
    'compare_models',
]


class MarketSummary(FrozenModel):
    converged: bool
    convergence_time: Optional[int] = None
    max_delta_p: float
    mean_delta_p: float
    total_moved: int


class ModelComparison(FrozenModel):
    """
    A strategic run and its non-strategic benchmark under the same seed.

    Attributes:
        seed (int): Shared seed.
        strategic (MarketSummary): Riders may walk out of the surge zone.
        benchmark (MarketSummary): Riders never move.
        rel_diff_pct (float): Relative difference of the time-averaged price gaps, in percent.
    """
    seed: int
    strategic: MarketSummary
    benchmark: MarketSummary
    rel_diff_pct: float


def summarize(run: MarketRun) -> MarketSummary:
    return MarketSummary(
        converged=run.converged,
        convergence_time=run.convergence_time,
        max_delta_p=run.max_delta_p,
        mean_delta_p=run.mean_delta_p,
        total_moved=run.total_moved
    )


def relative_difference(strategic_gap: float, benchmark_gap: float) -> float:
    """
    ``100 * (strategic - benchmark) / benchmark``; zero when neither run priced a
    gap, infinite when only the strategic one did.
    """
    if benchmark_gap == 0:
        return 0.0 if strategic_gap == 0 else math.inf

    return 100.0 * (strategic_gap - benchmark_gap) / benchmark_gap


def compare_models(params: AgentParams) -> ModelComparison:
    strategic = summarize(simulate_market(params.model_copy(update=dict(strategic=True))))
    benchmark = summarize(simulate_market(params.model_copy(update=dict(strategic=False))))
    return ModelComparison(
        seed=params.seed,
        strategic=strategic,
        benchmark=benchmark,
        rel_diff_pct=relative_difference(strategic.mean_delta_p, benchmark.mean_delta_p)
    )
