from hypothesis import given, settings
from hypothesis import strategies as st

from surgesim.analysis import audit_bounds
from surgesim.dynamics import (
    SurgeType,
    TheoryParams,
    classify_surge,
    convergence_times,
    detect_inversion,
    peak_time,
    simulate,
    tau_s_bounds,
)
from surgesim.stochastic import ArrivalKind, ArrivalProcess, StochasticParams, simulate_stochastic
from surgesim_test import theory_params


@given(params=theory_params())
@settings(max_examples=1000, deadline=None)
def test_fluid_run_meets_every_bound(params: TheoryParams):
    trajectory = simulate(params)
    assert trajectory.converged
    report = audit_bounds(trajectory, params)
    assert report.violations == []


@given(params=theory_params())
@settings(max_examples=200, deadline=None)
def test_localized_iff_no_peak(params: TheoryParams):
    tau = peak_time(simulate(params), params)
    assert (classify_surge(params) == SurgeType.LOCALIZED) == (tau == 0)


@given(params=theory_params(max_d0_surge=10 ** 4))
@settings(max_examples=200, deadline=None)
def test_inversion_persists(params: TheoryParams):
    trajectory = simulate(params)
    inversion = detect_inversion(trajectory)
    if inversion is None:
        return

    for state in trajectory.states[inversion:]:
        assert state.d_ns > state.d_s or state.d_s == state.d_ns == 0


@given(params=theory_params(max_d0_surge=10 ** 4))
@settings(max_examples=100, deadline=None)
def test_no_move_rate_drains_linearly(params: TheoryParams):
    params = params.model_copy(update=dict(k=0.0))
    tau_s, _ = convergence_times(simulate(params))
    assert tau_s == tau_s_bounds(params)[1]
    assert classify_surge(params) == SurgeType.LOCALIZED


@given(params=theory_params(max_d0_surge=10 ** 4), seed=st.integers(0, 2 ** 64 - 1))
@settings(max_examples=100, deadline=None)
def test_deterministic_arrivals_reduce_to_fluid(params: TheoryParams, seed: int):
    stochastic = simulate_stochastic(
        StochasticParams(
            base=params,
            demand_process=ArrivalProcess(kind=ArrivalKind.DETERMINISTIC, mean=params.lam),
            supply_process=ArrivalProcess(kind=ArrivalKind.DETERMINISTIC, mean=params.mu),
            seed=seed
        )
    )
    assert stochastic.states == simulate(params).states


@given(params=theory_params(max_d0_surge=10 ** 3), seed=st.integers(0, 2 ** 32))
@settings(max_examples=100, deadline=None)
def test_stochastic_demand_never_negative(params: TheoryParams, seed: int):
    trajectory = simulate_stochastic(StochasticParams.poisson(params, seed))
    assert all(state.d_s >= 0 and state.d_ns >= 0 for state in trajectory.states)
    assert trajectory == simulate_stochastic(StochasticParams.poisson(params, seed))
