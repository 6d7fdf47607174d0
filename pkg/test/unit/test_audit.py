import pytest

from surgesim.analysis import audit_bounds, audit_sampled
from surgesim.dynamics import DemandState, SurgeType, Trajectory, simulate
from surgesim.errors import NotConvergedError
from surgesim.model import Window
from surgesim.stochastic import StochasticParams, simulate_stochastic


class TestAuditBounds:
    def test_spill_over(self, spill_over_params):
        report = audit_bounds(simulate(spill_over_params), spill_over_params)
        assert report.ok
        assert report.tau_s_bounds == Window[int](lower=8, upper=50)
        assert report.tau_n_bounds == Window[int](lower=10, upper=60)
        assert (report.tau_s_observed, report.tau_n_observed) == (32, 29)
        assert (report.tau_s_steps, report.tau_n_steps) == (33, 30)
        assert report.peak_tau_observed == 6
        assert report.surge_type == SurgeType.SPILL_OVER
        assert report.inversion_time is None
        assert report.clearing_bound == 60
        assert report.clearing_time == 32

    def test_localized(self, localized_params):
        report = audit_bounds(simulate(localized_params), localized_params)
        assert report.ok
        assert report.peak_tau_observed == 0
        assert report.surge_type == SurgeType.LOCALIZED

    def test_inversion_keeps_bounds(self, inversion_params):
        report = audit_bounds(simulate(inversion_params), inversion_params)
        assert report.ok
        assert report.inversion_time == 1
        assert report.peak_tau_observed == 1
        assert report.clearing_time == 50

    def test_not_converged(self, spill_over_params):
        params = spill_over_params.model_copy(update=dict(horizon=10))
        with pytest.raises(NotConvergedError):
            audit_bounds(simulate(params), params)

    def test_flags_violations(self, spill_over_params):
        trajectory = Trajectory(
            params=spill_over_params,
            states=[
                DemandState(t=0, d_s=1000, d_ns=200),
                DemandState(t=1, d_s=1010, d_ns=200),
                DemandState(t=2, d_s=0, d_ns=0),
            ],
            converged=True
        )
        report = audit_bounds(trajectory, spill_over_params)
        assert not report.ok
        assert 'surge demand increased at t=1' in report.violations
        assert 'tau_s=2 outside (8, 50)' in report.violations
        assert 'total demand not conserved at t=1' in report.violations

    def test_flags_flat_nonsurge_before_peak(self, spill_over_params):
        states = list(simulate(spill_over_params).states)
        states[2] = states[2].model_copy(update=dict(d_ns=states[1].d_ns))
        trajectory = Trajectory(params=spill_over_params, states=states, converged=True)
        report = audit_bounds(trajectory, spill_over_params)
        assert report.peak_tau_observed == 6
        assert 'non-surge demand did not increase before its peak at t=2' in report.violations


def bumped(params, t: int, extra: float) -> Trajectory:
    states = list(simulate(params).states)
    states[t] = states[t].model_copy(update=dict(d_s=states[t].d_s + extra))
    return Trajectory(params=params, states=states, converged=True)


class TestAuditSampled:
    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_stochastic_run(self, spill_over_params, seed):
        trajectory = simulate_stochastic(StochasticParams.poisson(spill_over_params, seed=seed))
        report = audit_sampled(trajectory, spill_over_params)
        assert report.ok
        assert report.tau_s_bounds == Window[int](lower=8, upper=50)
        assert report.clearing_time <= report.clearing_bound

    def test_skips_shape_checks(self, spill_over_params):
        trajectory = bumped(spill_over_params, 3, 200.0)
        assert audit_sampled(trajectory, spill_over_params).ok
        assert 'surge demand increased at t=3' in \
            audit_bounds(trajectory, spill_over_params).violations

    def test_flags_windows(self, spill_over_params):
        trajectory = Trajectory(
            params=spill_over_params,
            states=[DemandState(t=0, d_s=1000, d_ns=200), DemandState(t=1, d_s=0, d_ns=0)],
            converged=True
        )
        report = audit_sampled(trajectory, spill_over_params)
        assert report.violations == ['tau_s=1 outside (8, 50)', 'tau_n=1 outside (10, 60)']

    def test_not_converged(self, spill_over_params):
        params = spill_over_params.model_copy(update=dict(horizon=10))
        trajectory = simulate_stochastic(StochasticParams.poisson(params, seed=0))
        with pytest.raises(NotConvergedError):
            audit_sampled(trajectory, params)
