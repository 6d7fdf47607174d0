import logging
from typing import List, Tuple

from ..dynamics import (
    BoundsReport,
    SurgeType,
    TheoryParams,
    Trajectory,
    classify_surge,
    clearing_bound,
    convergence_times,
    detect_inversion,
    peak_time,
    step_counts,
    tau_n_bounds,
    tau_s_bounds,
)
from ..model import Window

__all__ = [
    'audit_bounds',
    'audit_sampled',
]

logger = logging.getLogger(__name__)


def _slack(value: float, params: TheoryParams) -> float:
    return params.tol * max(1.0, abs(value))


def _shape_violations(
        traj: Trajectory, params: TheoryParams, tau: int, inversion: int | None
) -> List[str]:
    violations = []
    d_s, d_ns = traj.d_s, traj.d_ns
    for t in range(len(traj.states) - 1):
        if d_s[t + 1] > d_s[t] + _slack(d_s[t], params):
            violations.append(f"surge demand increased at t={t + 1}")
        if t < tau and d_ns[t + 1] <= d_ns[t]:
            violations.append(f"non-surge demand did not increase before its peak at t={t + 1}")
        if t >= tau and d_ns[t + 1] > d_ns[t] + _slack(d_ns[t], params):
            violations.append(f"non-surge demand increased after its peak at t={t + 1}")
        if d_s[t + 1] > 0 and d_ns[t + 1] > 0:
            expected = d_s[t] + d_ns[t] - 2 * params.excess_supply
            if abs(d_s[t + 1] + d_ns[t + 1] - expected) > _slack(expected, params):
                violations.append(f"total demand not conserved at t={t + 1}")

    if inversion is not None:
        for state in traj.states[inversion:]:
            if not (state.d_ns > state.d_s or state.d_s == state.d_ns == 0):
                violations.append(f"surge inversion reverted at t={state.t}")
                break

    return violations


def _windows(params: TheoryParams) -> Tuple[Window[int], Window[int]]:
    s_lower, s_upper = tau_s_bounds(params)
    n_lower, n_upper = tau_n_bounds(params)
    return Window[int](lower=s_lower, upper=s_upper), Window[int](lower=n_lower, upper=n_upper)


def _audit(trajectory: Trajectory, params: TheoryParams, sampled: bool) -> BoundsReport:
    tau_s, tau_n = convergence_times(trajectory)
    tau_s_steps, tau_n_steps = step_counts(trajectory)
    tau = peak_time(trajectory, params)
    surge_type = classify_surge(params)
    inversion = detect_inversion(trajectory)
    s_bounds, n_bounds = _windows(params)
    bound = clearing_bound(params)
    clearing_time = len(trajectory.states) - 1

    violations = []
    if not s_bounds.contains(tau_s):
        violations.append(f"tau_s={tau_s} outside {s_bounds.as_tuple()}")
    if not n_bounds.contains(tau_n):
        violations.append(f"tau_n={tau_n} outside {n_bounds.as_tuple()}")
    if clearing_time > bound:
        violations.append(f"total demand cleared at t={clearing_time} after bound {bound}")
    if not sampled:
        if (surge_type == SurgeType.LOCALIZED) != (tau == 0):
            violations.append(f"surge classified {surge_type} with peak time {tau}")
        violations.extend(_shape_violations(trajectory, params, tau, inversion))

    report = BoundsReport(
        tau_s_bounds=s_bounds,
        tau_n_bounds=n_bounds,
        tau_s_observed=tau_s,
        tau_n_observed=tau_n,
        tau_s_steps=tau_s_steps,
        tau_n_steps=tau_n_steps,
        peak_tau_observed=tau,
        surge_type=surge_type,
        inversion_time=inversion,
        clearing_bound=bound,
        clearing_time=clearing_time,
        violations=violations
    )
    if violations:
        logger.warning('bound audit failed', extra=dict(violations=violations, sampled=sampled))
    else:
        logger.info(
            'bound audit passed',
            extra=dict(
                tau_s=tau_s, tau_n=tau_n, peak_tau=tau, surge_type=str(surge_type),
                sampled=sampled
            )
        )

    return report


def audit_bounds(trajectory: Trajectory, params: TheoryParams) -> BoundsReport:
    """
    Collects the observed event times of a converged fluid run together with their
    theoretical windows and flags every property the run fails.

    Checked properties: convergence times inside their windows, total demand cleared
    within its bound, a non-increasing surge demand, a non-surge demand rising strictly
    up to the peak time and never after it, exact total-demand drain while both zones
    wait, the localized classification agreeing with a zero peak time, and a persistent
    inversion.

    Raises:
        NotConvergedError: If the trajectory did not converge.
    """
    return _audit(trajectory, params, sampled=False)


def audit_sampled(trajectory: Trajectory, params: TheoryParams) -> BoundsReport:
    """
    Audit of a sampled (stochastic) trajectory against the windows of its fluid
    parameters.

    Sampled arrivals and supply break the exact drain and the monotone shapes, so only
    the convergence windows and the clearing bound are checked; demands are nonnegative
    by construction of `DemandState`. Peak time, classification and inversion are still
    reported.

    Raises:
        NotConvergedError: If the trajectory did not converge.
    """
    return _audit(trajectory, params, sampled=True)
