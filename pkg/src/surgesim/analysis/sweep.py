import logging
from concurrent.futures import Executor
from enum import StrEnum
from typing import Any, List, Optional, Sequence

from ..dynamics import BoundsReport, TheoryParams, simulate
from ..errors import SurgeSimError
from ..logutils import logcontext
from ..market import AgentParams
from ..model import FrozenModel
from ..stochastic import StochasticParams, simulate_stochastic
from .audit import audit_bounds, audit_sampled
from .compare import ModelComparison, compare_models

__all__ = [
    'SweepParams',
    'SweepQuantity',
    'SweepPoint',
    'instantiate',
    'sweep_point',
    'sweep',
]

logger = logging.getLogger(__name__)

SweepParams = TheoryParams | StochasticParams | AgentParams

_ALIASES = {'lam': 'lambda'}


class SweepQuantity(StrEnum):
    """Per-point quantities a sweep expectation can track across points."""
    TAU_S = 'tau_s'
    TAU_N = 'tau_n'
    TAU_GAP = 'tau_gap'
    PEAK_TAU = 'peak_tau'
    SA_CONVERGENCE_TIME = 'sa_convergence_time'
    NSB_CONVERGENCE_TIME = 'nsb_convergence_time'
    SA_MEAN_DELTA_P = 'sa_mean_delta_p'
    NSB_MEAN_DELTA_P = 'nsb_mean_delta_p'
    SA_MAX_DELTA_P = 'sa_max_delta_p'
    NSB_MAX_DELTA_P = 'nsb_max_delta_p'
    REL_DIFF_PCT = 'rel_diff_pct'


_REPORT_QUANTITIES = {
    SweepQuantity.TAU_S: 'tau_s_observed',
    SweepQuantity.TAU_N: 'tau_n_observed',
    SweepQuantity.PEAK_TAU: 'peak_tau_observed',
}


class SweepPoint(FrozenModel):
    """
    Outcome of one instantiation of a sweep.

    Attributes:
        value (Any): Value (or tuple of values) assigned to the swept parameters.
        report (Optional[BoundsReport]): Bound audit, for fluid and stochastic runs.
        comparison (Optional[ModelComparison]): Strategic versus benchmark, for agent runs.
        error (Optional[str]): Why the point could not be evaluated.
    """
    value: Any
    report: Optional[BoundsReport] = None
    comparison: Optional[ModelComparison] = None
    error: Optional[str] = None

    def quantity(self, name: SweepQuantity) -> Optional[float]:
        """
        Value of `name` at this point, or None when the point did not produce it
        (an agent quantity on a fluid point, say).
        """
        report, comparison = self.report, self.comparison
        if name == SweepQuantity.TAU_GAP:
            return None if report is None else report.tau_s_observed - report.tau_n_observed
        if name in _REPORT_QUANTITIES:
            return None if report is None else getattr(report, _REPORT_QUANTITIES[name])

        if comparison is None:
            return None
        if name == SweepQuantity.REL_DIFF_PCT:
            return comparison.rel_diff_pct
        model, field = name.split('_', 1)
        summary = comparison.strategic if model == 'sa' else comparison.benchmark
        return getattr(summary, field)


def _assign(data: dict, path: str, value: Any):
    *parents, leaf = path.split('.')
    for parent in parents:
        data = data[parent]
    if leaf not in data and _ALIASES.get(leaf) in data:
        leaf = _ALIASES[leaf]
    if leaf not in data:
        raise KeyError(f"unknown parameter '{path}'")
    data[leaf] = value


def instantiate(template: SweepParams, names: Sequence[str], values: Sequence[Any]) -> SweepParams:
    """
    Copies `template` with each named parameter set to its value and validates the
    result. Dotted names reach into nested models (``cost_dist.mean``); stochastic
    templates address their fluid parameters directly and keep the arrival means in
    step with ``lambda`` and ``mu``. The horizon falls back to its default unless it
    is one of the swept names.

    Raises:
        KeyError: If a name does not exist in the template.
        ValidationError: If the instantiated parameters are invalid.
    """
    data = template.model_dump(by_alias=True)
    for name, value in zip(names, values, strict=True):
        if isinstance(template, StochasticParams) and name.split('.')[0] not in data:
            _assign(data['base'], name, value)
        else:
            _assign(data, name, value)

    if isinstance(template, StochasticParams):
        data['demand_process']['mean'] = data['base']['lambda']
        data['supply_process']['mean'] = data['base']['mu']
        if 'horizon' not in names:
            data['base']['horizon'] = None
    elif 'horizon' not in names:
        data['horizon'] = None

    return template.__class__.model_validate(data)


def sweep_point(template: SweepParams, names: Sequence[str], value: Any) -> SweepPoint:
    values = list(value) if len(names) > 1 else [value]
    with logcontext() as lc:
        lc.set(sweep=','.join(names), sweep_value=str(value))
        try:
            params = instantiate(template, names, values)
            if isinstance(params, AgentParams):
                return SweepPoint(value=value, comparison=compare_models(params))

            if isinstance(params, StochasticParams):
                trajectory, base = simulate_stochastic(params), params.base
            else:
                trajectory, base = simulate(params), params
            audit = audit_sampled if isinstance(params, StochasticParams) else audit_bounds
            return SweepPoint(value=value, report=audit(trajectory, base))
        except (KeyError, ValueError, SurgeSimError) as err:
            logger.warning('sweep point failed', extra=dict(error=str(err)))
            return SweepPoint(value=value, error=str(err))


def sweep(
        template: SweepParams,
        varying: str | Sequence[str],
        values: Sequence[Any],
        executor: Optional[Executor] = None
) -> List[SweepPoint]:
    """
    Evaluates `template` once per value of the swept parameter(s).

    Sweeping several parameters together pairs them up: `values` then holds one
    sequence per point, e.g. ``varying=['mu', 'lambda']`` with
    ``values=[[30, 5], [30, 15]]``. Invalid points are reported through
    ``SweepPoint.error`` and do not stop the sweep. Results keep the order of `values`.
    """
    names = [varying] if isinstance(varying, str) else list(varying)
    count = len(values)
    task_args = ([template] * count, [names] * count, list(values))
    if executor:
        return list(executor.map(sweep_point, *task_args))

    return list(map(sweep_point, *task_args))
