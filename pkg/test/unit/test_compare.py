import math

from surgesim.analysis import compare_models, relative_difference, summarize
from surgesim.market import TruncatedNormalSpec, simulate_market


class TestRelativeDifference:
    def test_values(self):
        assert relative_difference(1.0, 2.0) == -50.0
        assert relative_difference(3.0, 2.0) == 50.0
        assert relative_difference(0.0, 0.0) == 0.0
        assert math.isinf(relative_difference(1.0, 0.0))


class TestCompareModels:
    def test_summarize(self, small_agent_params):
        run = simulate_market(small_agent_params)
        summary = summarize(run)
        assert summary.converged == run.converged
        assert summary.mean_delta_p == run.mean_delta_p
        assert summary.total_moved == run.total_moved

    def test_benchmark_never_moves(self, small_agent_params):
        comparison = compare_models(small_agent_params)
        assert comparison.seed == small_agent_params.seed
        assert comparison.benchmark.total_moved == 0
        assert comparison.strategic.total_moved > 0
        assert comparison.rel_diff_pct == relative_difference(
            comparison.strategic.mean_delta_p, comparison.benchmark.mean_delta_p
        )

    def test_unwilling_riders_change_nothing(self, small_agent_params):
        params = small_agent_params.model_copy(
            update=dict(cost_dist=TruncatedNormalSpec(mean=1e9, std=1.0))
        )
        comparison = compare_models(params)
        assert comparison.strategic == comparison.benchmark
        assert comparison.rel_diff_pct == 0.0

    def test_ignores_template_strategy(self, small_agent_params):
        benchmark_template = small_agent_params.model_copy(update=dict(strategic=False))
        assert compare_models(benchmark_template) == compare_models(small_agent_params)
