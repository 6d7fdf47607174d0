"""
Command execution over scenarios, and the checks of their embedded expectations.
"""
import logging
from concurrent.futures import Executor
from typing import List, Optional, Tuple

from ..analysis import (
    SweepPoint,
    audit_bounds,
    audit_sampled,
    fit_k,
    fit_k_market,
    heatmap,
    relative_difference,
    sweep,
)
from ..dynamics import Trajectory, convergence_times, simulate
from ..errors import ExpectationError, NotConvergedError, ScenarioError
from ..logutils import logcontext
from ..market import MarketRun, simulate_market
from ..stochastic import simulate_stochastic
from .artifact import (
    Artifact,
    ArtifactMetadata,
    AuditArtifact,
    FitArtifact,
    HeatmapArtifact,
    RunArtifact,
    SeedOutcome,
    SweepArtifact,
    market_rows,
    trajectory_rows,
)
from .scenario import Direction, ModelKind, MonotoneSpec, Scenario

__all__ = [
    'run',
    'run_audit',
    'run_sweep',
    'run_fit',
    'run_heatmap',
    'check_expectations',
    'verify',
]

logger = logging.getLogger(__name__)


def _fluid_run(scenario: Scenario, seed: int) -> Tuple[Trajectory, SeedOutcome]:
    if scenario.model == ModelKind.THEORY:
        trajectory = simulate(scenario.theory_params())
    else:
        trajectory = simulate_stochastic(scenario.stochastic_params(seed))

    tau_s = tau_n = None
    if trajectory.converged:
        tau_s, tau_n = convergence_times(trajectory)
    return trajectory, SeedOutcome(
        seed=seed, converged=trajectory.converged, tau_s=tau_s, tau_n=tau_n
    )


def _agent_run(scenario: Scenario, seed: int) -> Tuple[MarketRun, SeedOutcome]:
    params = scenario.agent_params(seed)
    market = simulate_market(params)
    rel_diff_pct = None
    if params.strategic:
        benchmark = simulate_market(params.model_copy(update=dict(strategic=False)))
        rel_diff_pct = relative_difference(market.mean_delta_p, benchmark.mean_delta_p)

    return market, SeedOutcome(
        seed=seed,
        converged=market.converged,
        convergence_time=market.convergence_time,
        mean_delta_p=market.mean_delta_p,
        max_delta_p=market.max_delta_p,
        total_moved=market.total_moved,
        rel_diff_pct=rel_diff_pct
    )


def run(scenario: Scenario) -> RunArtifact:
    """
    Simulates the scenario's model once per seed.

    The artifact rows hold the trajectory of the first seed. Fluid runs that
    converge also carry their bound audit. Strategic agent runs are paired with their
    non-strategic benchmark under the same seed to report the price-gap difference.
    """
    seeds = scenario.run_seeds
    rows, report, outcomes = None, None, []
    with logcontext() as lc:
        lc.set(scenario=scenario.name, model=str(scenario.model))
        for seed in seeds:
            lc.set(seed=seed)
            if scenario.is_agent:
                market, outcome = _agent_run(scenario, seed)
                rows = rows if rows is not None else market_rows(market)
            else:
                trajectory, outcome = _fluid_run(scenario, seed)
                if rows is None:
                    rows = trajectory_rows(trajectory)
                    if scenario.model == ModelKind.THEORY and trajectory.converged:
                        report = audit_bounds(trajectory, scenario.theory_params())
            outcomes.append(outcome)

        artifact = RunArtifact(
            scenario=scenario,
            metadata=ArtifactMetadata(command='run', seeds=seeds),
            rows=rows,
            report=report,
            outcomes=outcomes,
            converged=all(outcome.converged for outcome in outcomes)
        )
        logger.info(
            'scenario run',
            extra=dict(
                converged=artifact.converged,
                mean_tau_s=artifact.mean_tau_s,
                mean_tau_n=artifact.mean_tau_n,
                mean_convergence_time=artifact.mean_convergence_time
            )
        )
        return artifact


def run_audit(scenario: Scenario) -> AuditArtifact:
    """
    Audits the fluid trajectory of a theory scenario against the closed-form windows
    and shapes, or the first seed's trajectory of a stochastic one against the
    windows only (see `audit_sampled`).

    Raises:
        ScenarioError: For agent scenarios.
        NotConvergedError: If the trajectory did not converge.
    """
    if scenario.is_agent:
        raise ScenarioError(['audit requires a theory or stochastic model'], scenario.name)

    seed = scenario.run_seeds[0]
    with logcontext() as lc:
        lc.set(scenario=scenario.name, model=str(scenario.model), seed=seed)
        trajectory, _ = _fluid_run(scenario, seed)
        try:
            audit = audit_sampled if scenario.model == ModelKind.STOCHASTIC else audit_bounds
            report = audit(trajectory, scenario.theory_params())
        except NotConvergedError as err:
            raise NotConvergedError(f"scenario '{scenario.name}': {err}", err.horizon) from err

        return AuditArtifact(
            scenario=scenario,
            metadata=ArtifactMetadata(command='audit', seeds=[seed]),
            report=report
        )


def run_sweep(scenario: Scenario, executor: Optional[Executor] = None) -> SweepArtifact:
    if scenario.sweep is None:
        raise ScenarioError(['sweep requires a [sweep] table'], scenario.name)

    spec = scenario.sweep
    parameters = [spec.parameter] if isinstance(spec.parameter, str) else list(spec.parameter)
    with logcontext() as lc:
        lc.set(scenario=scenario.name, model=str(scenario.model), seed=scenario.seed)
        points = sweep(scenario.params(), parameters, spec.values, executor=executor)
        return SweepArtifact(
            scenario=scenario,
            metadata=ArtifactMetadata(command='sweep', seeds=[scenario.seed]),
            parameters=parameters,
            points=points
        )


def run_fit(scenario: Scenario) -> FitArtifact:
    """
    Fits ``k`` against one strategic agent run per seed, or against the fluid
    trajectory itself for theory scenarios.

    Raises:
        ScenarioError: If the scenario has no ``[fit]`` table or a stochastic model.
        NotConvergedError: If an observed run did not converge.
    """
    if scenario.fit is None:
        raise ScenarioError(['fit-k requires a [fit] table'], scenario.name)
    if scenario.model == ModelKind.STOCHASTIC:
        raise ScenarioError(['fit-k requires a theory or agent model'], scenario.name)

    spec = scenario.fit
    k_range = (spec.k_min, spec.k_max)
    seeds = scenario.run_seeds
    with logcontext() as lc:
        lc.set(scenario=scenario.name, model=str(scenario.model))
        if scenario.is_agent:
            results = fit_k_market(scenario.agent_params(), seeds, k_range, spec.grid_size)
        else:
            params = scenario.theory_params()
            results = [fit_k(simulate(params), params, k_range, spec.grid_size)]
            seeds = seeds[:1]

        artifact = FitArtifact(
            scenario=scenario,
            metadata=ArtifactMetadata(command='fit-k', seeds=seeds),
            results=results
        )
        logger.info('fit finished', extra=dict(mean_k_star=artifact.mean_k_star))
        return artifact


def run_heatmap(scenario: Scenario, executor: Optional[Executor] = None) -> HeatmapArtifact:
    if scenario.heatmap is None:
        raise ScenarioError(['heatmap requires a [heatmap] table'], scenario.name)
    if not scenario.is_agent:
        raise ScenarioError(['heatmap requires an agent model'], scenario.name)

    spec = scenario.heatmap
    seeds = scenario.run_seeds
    with logcontext() as lc:
        lc.set(scenario=scenario.name, model=str(scenario.model))
        cells = heatmap(
            scenario.agent_params(), spec.d_mean, spec.d_std,
            horizon=spec.horizon, seeds=seeds, executor=executor
        )
        return HeatmapArtifact(
            scenario=scenario,
            metadata=ArtifactMetadata(command='heatmap', seeds=seeds),
            cells=cells
        )


def _check_equal(failures: List[str], name: str, expected, observed):
    if expected is not None and expected != observed:
        failures.append(f"{name}: expected {expected}, observed {observed}")


def _check_window(failures: List[str], name: str, window, observed):
    if window is None:
        return
    lower, upper = window
    if observed is None or not lower <= observed <= upper:
        failures.append(f"{name}: expected within [{lower}, {upper}], observed {observed}")


def _check_run(failures: List[str], artifact: RunArtifact):
    expect = artifact.scenario.expect
    first = artifact.outcomes[0]
    _check_equal(failures, 'converged', expect.converged, artifact.converged)
    _check_equal(failures, 'tau_s', expect.tau_s, first.tau_s)
    _check_equal(failures, 'tau_n', expect.tau_n, first.tau_n)
    _check_window(failures, 'tau_s', expect.tau_s_window, artifact.mean_tau_s)
    _check_window(failures, 'tau_n', expect.tau_n_window, artifact.mean_tau_n)
    _check_window(
        failures, 'convergence_time', expect.convergence_window,
        artifact.mean_convergence_time
    )
    _check_window(failures, 'rel_diff_pct', expect.rel_diff_window, artifact.mean_rel_diff_pct)

    report = artifact.report
    report_checks = (
        'tau_s_steps', 'tau_n_steps', 'peak_tau', 'surge_type', 'inversion_time',
        'no_inversion', 'bounds_hold'
    )
    for name in report_checks:
        if getattr(expect, name) is not None and report is None:
            failures.append(f"{name}: no bound report for this run")
            return
    if report is None:
        return

    _check_equal(failures, 'tau_s_steps', expect.tau_s_steps, report.tau_s_steps)
    _check_equal(failures, 'tau_n_steps', expect.tau_n_steps, report.tau_n_steps)
    _check_equal(failures, 'peak_tau', expect.peak_tau, report.peak_tau_observed)
    _check_equal(failures, 'surge_type', expect.surge_type, report.surge_type)
    _check_equal(failures, 'inversion_time', expect.inversion_time, report.inversion_time)
    if expect.no_inversion and report.inversion_time is not None:
        failures.append(f"no_inversion: inversion observed at t={report.inversion_time}")
    if expect.bounds_hold and not report.ok:
        failures.append(f"bounds_hold: {'; '.join(report.violations)}")


def _check_audit(failures: List[str], artifact: AuditArtifact):
    expect, report = artifact.scenario.expect, artifact.report
    _check_equal(failures, 'tau_s', expect.tau_s, report.tau_s_observed)
    _check_equal(failures, 'tau_n', expect.tau_n, report.tau_n_observed)
    _check_equal(failures, 'tau_s_steps', expect.tau_s_steps, report.tau_s_steps)
    _check_equal(failures, 'tau_n_steps', expect.tau_n_steps, report.tau_n_steps)
    _check_equal(failures, 'peak_tau', expect.peak_tau, report.peak_tau_observed)
    _check_equal(failures, 'surge_type', expect.surge_type, report.surge_type)
    _check_equal(failures, 'inversion_time', expect.inversion_time, report.inversion_time)
    if not report.ok:
        failures.append(f"bounds_hold: {'; '.join(report.violations)}")


def _check_monotone(failures: List[str], spec: MonotoneSpec, points: List[SweepPoint]):
    name = f"monotone {spec.quantity}"
    observed = [point.quantity(spec.quantity) for point in points]
    if any(value is None for value in observed):
        failures.append(f"{name}: not available at every point, observed {observed}")
        return

    sign = 1 if spec.direction == Direction.INCREASING else -1
    strictly = 'strictly ' if spec.strict else ''
    for i in range(1, len(points)):
        step = sign * (observed[i] - observed[i - 1])
        if step < 0 or (spec.strict and step == 0):
            failures.append(
                f"{name}: expected {strictly}{spec.direction} from value {points[i - 1].value}"
                f" to {points[i].value}, observed {observed[i - 1]} then {observed[i]}"
            )


def _check_sweep(failures: List[str], artifact: SweepArtifact):
    expect = artifact.scenario.expect
    for point in artifact.points:
        if point.error is not None:
            failures.append(f"value {point.value}: {point.error}")
    if expect.surge_types is not None:
        observed = [point.report.surge_type if point.report else None for point in artifact.points]
        _check_equal(failures, 'surge_types', list(expect.surge_types), observed)
    if expect.bounds_hold:
        for point in artifact.points:
            if point.report is not None and not point.report.ok:
                failures.append(
                    f"value {point.value}: {'; '.join(point.report.violations)}"
                )
    for spec in expect.monotone or []:
        _check_monotone(failures, spec, artifact.points)


def _check_heatmap(failures: List[str], artifact: HeatmapArtifact):
    limit = artifact.scenario.expect.max_rel_diff_pct
    if limit is None:
        return
    for row in artifact.cells:
        for cell in row:
            if cell.rel_diff_pct > limit:
                failures.append(
                    f"cell ({cell.d_mean}, {cell.d_std}): rel_diff_pct {cell.rel_diff_pct}"
                    f" above {limit}"
                )


def check_expectations(artifact: Artifact) -> List[str]:
    """
    Compares an artifact with the ``[expect]`` table of its scenario.

    Only the expectations that apply to the artifact's command are checked.

    Returns:
        One description per unmet expectation; empty when there is nothing to check.
    """
    if artifact.scenario.expect is None:
        return []

    failures = []
    if isinstance(artifact, RunArtifact):
        _check_run(failures, artifact)
    elif isinstance(artifact, AuditArtifact):
        _check_audit(failures, artifact)
    elif isinstance(artifact, SweepArtifact):
        _check_sweep(failures, artifact)
    elif isinstance(artifact, FitArtifact):
        _check_window(failures, 'k_star', artifact.scenario.expect.k_window, artifact.mean_k_star)
    elif isinstance(artifact, HeatmapArtifact):
        _check_heatmap(failures, artifact)

    return failures


def verify(artifact: Artifact) -> Artifact:
    """
    Raises:
        ExpectationError: If any embedded expectation is not met.
    """
    if failures := check_expectations(artifact):
        logger.warning('expectations not met', extra=dict(failures=failures))
        raise ExpectationError(failures, artifact.scenario.name)

    return artifact
