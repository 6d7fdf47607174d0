import pytest
from pydantic import ValidationError

from surgesim.market import (
    STREAM_NAMES,
    AgentParams,
    PricingConfig,
    TruncatedNormalSpec,
    driver_split,
    initial_market,
    market_step,
    simulate_market,
)
from surgesim.streams import spawn_streams


class TestAgentParams:
    def test_defaults(self, small_agent_params):
        assert small_agent_params.horizon == 10 * 35
        assert small_agent_params.total_supply == 10
        assert small_agent_params.wtp_dist == TruncatedNormalSpec(mean=7.0, std=2.0)
        assert small_agent_params.pricing == PricingConfig()
        assert small_agent_params.strategic

    def test_requires_draining_market(self):
        with pytest.raises(ValidationError, match='requires lambda < mu'):
            AgentParams(
                lam=5, mu=5, d0_surge=10, d0_nonsurge=0,
                cost_dist=TruncatedNormalSpec(mean=1, std=1)
            )

    def test_requires_cost_dist(self):
        with pytest.raises(ValidationError):
            AgentParams(lam=3, mu=5, d0_surge=10, d0_nonsurge=0)


class TestMarketStep:
    def test_initial_record(self, small_agent_params):
        streams = spawn_streams(small_agent_params.seed, STREAM_NAMES)
        state, record = initial_market(small_agent_params, streams)
        assert (record.t, record.d_s, record.d_ns) == (0, 60, 10)
        assert len(state.surge) == 60
        assert state.nonsurge.ids.tolist() == list(range(60, 70))
        assert record.delta_p == pytest.approx(4 * 1.791759469228055)
        assert record.moved == 0

    def test_step_conserves_riders(self, small_agent_params):
        streams = spawn_streams(small_agent_params.seed, STREAM_NAMES)
        state, previous = initial_market(small_agent_params, streams)
        for _ in range(5):
            state, record = market_step(state, small_agent_params, streams)
            assert record.d_s == previous.d_s - record.moved + record.arrived_s - record.matched_s
            assert record.d_ns == previous.d_ns + record.moved + record.arrived_ns \
                - record.matched_ns
            assert record.matched_s <= record.r_s
            assert record.matched_ns <= record.r_ns
            assert record.t == previous.t + 1
            previous = record

    def test_step_prices_previous_demand(self, small_agent_params):
        streams = spawn_streams(small_agent_params.seed, STREAM_NAMES)
        state, initial = initial_market(small_agent_params, streams)
        _, record = market_step(state, small_agent_params, streams)
        assert record.delta_p == initial.delta_p
        assert record.p_s == pytest.approx(1.0 + initial.delta_p)
        assert record.p_ns == 1.0
        assert (record.gamma_s, record.gamma_ns) == driver_split(record.p_s, record.p_ns, 0.25)


class TestSimulateMarket:
    def test_reproducible(self, small_agent_params):
        assert simulate_market(small_agent_params) == simulate_market(small_agent_params)

    def test_converges(self, small_agent_params):
        run = simulate_market(small_agent_params)
        assert run.converged
        last = run.records[-1]
        assert last.d_s + last.d_ns < small_agent_params.total_supply
        assert run.convergence_time == len(run.records) - 1
        assert run.mean_delta_p >= 0
        assert run.max_delta_p == max(run.delta_p)

    def test_already_cleared(self):
        params = AgentParams(
            lam=3, mu=5, d0_surge=4, d0_nonsurge=2, seed=1,
            cost_dist=TruncatedNormalSpec(mean=2, std=1)
        )
        run = simulate_market(params)
        assert run.converged
        assert run.convergence_time == 0
        assert len(run.records) == 1
        assert run.mean_delta_p == 0.0

    def test_infinite_move_cost_matches_benchmark(self, small_agent_params):
        unwilling = small_agent_params.model_copy(
            update=dict(cost_dist=TruncatedNormalSpec(mean=1e9, std=1.0))
        )
        strategic = simulate_market(unwilling)
        benchmark = simulate_market(unwilling.model_copy(update=dict(strategic=False)))
        assert strategic.records == benchmark.records
        assert strategic.total_moved == 0

    def test_strategic_riders_move(self, small_agent_params):
        cheap = small_agent_params.model_copy(
            update=dict(cost_dist=TruncatedNormalSpec(mean=0.0, std=0.1))
        )
        run = simulate_market(cheap)
        # nearly every surge rider walks in the first step
        assert run.records[1].moved > 50

    def test_paired_runs_share_driver_draws(self, small_agent_params):
        params = small_agent_params.model_copy(update=dict(horizon=40, stop_on_clear=False))
        strategic = simulate_market(params)
        benchmark = simulate_market(params.model_copy(update=dict(strategic=False)))
        assert strategic.total_moved > 0
        for with_moves, without_moves in zip(strategic.records, benchmark.records, strict=True):
            assert with_moves.r_s + with_moves.r_ns == without_moves.r_s + without_moves.r_ns
            if with_moves.gamma_s <= without_moves.gamma_s:
                assert with_moves.r_s <= without_moves.r_s
            else:
                assert with_moves.r_s >= without_moves.r_s

    def test_full_horizon(self, small_agent_params):
        params = small_agent_params.model_copy(update=dict(horizon=40, stop_on_clear=False))
        run = simulate_market(params)
        assert len(run.records) == 41
        assert [record.t for record in run.records] == list(range(41))

    def test_exhausted_horizon(self, small_agent_params):
        run = simulate_market(small_agent_params.model_copy(update=dict(horizon=1)))
        assert not run.converged
        assert run.convergence_time is None
        assert len(run.records) == 2
