import numpy as np
import pytest
from pydantic import ValidationError

from surgesim.market import RiderAgent, RiderPool, TruncatedNormalSpec, Zone


def make_pool(arrived_at, wtp, first_id=0) -> RiderPool:
    count = len(arrived_at)
    return RiderPool(
        ids=np.arange(first_id, first_id + count, dtype=np.int64),
        arrived_at=np.asarray(arrived_at, dtype=np.int64),
        wtp=np.asarray(wtp, dtype=float),
        move_cost=np.zeros(count)
    )


class TestTruncatedNormalSpec:
    def test_sample_nonnegative(self):
        spec = TruncatedNormalSpec(mean=0.0, std=5.0)
        draws = spec.sample(np.random.default_rng(3), 2000)
        assert draws.shape == (2000,)
        assert draws.min() >= 0.0

    def test_sample_empty(self):
        assert TruncatedNormalSpec(mean=7, std=2).sample(np.random.default_rng(0), 0).size == 0

    def test_sample_reproducible(self):
        spec = TruncatedNormalSpec(mean=8, std=8)
        first = spec.sample(np.random.default_rng(5), 10)
        second = spec.sample(np.random.default_rng(5), 10)
        assert first.tolist() == second.tolist()

    def test_std_positive(self):
        with pytest.raises(ValidationError):
            TruncatedNormalSpec(mean=1.0, std=0.0)


class TestRiderPool:
    def test_empty(self):
        pool = RiderPool()
        assert len(pool) == 0
        assert pool.match(1.0, 10)[0] == 0

    def test_arrivals(self):
        pool = RiderPool.arrivals(5, 3, 2, np.array([7.0, 8.0, 9.0]), np.array([1.0, 2.0, 3.0]))
        assert pool.ids.tolist() == [5, 6, 7]
        assert pool.arrived_at.tolist() == [2, 2, 2]

    def test_match_oldest_first(self):
        pool = make_pool([0, 0, 1, 2], [9.0, 3.0, 9.0, 9.0])
        matched, waiting = pool.match(5.0, 2)
        assert matched == 2
        # the low-wtp rider is skipped, not served
        assert waiting.ids.tolist() == [1, 3]

    def test_match_runs_out_of_riders(self):
        pool = make_pool([0, 1], [9.0, 9.0])
        matched, waiting = pool.match(1.0, 10)
        assert matched == 2
        assert len(waiting) == 0
        assert pool.match(1.0, 0)[0] == 0

    def test_split_and_merge_restore_fifo(self):
        surge = make_pool([0, 1, 3], [5.0, 5.0, 5.0], first_id=0)
        nonsurge = make_pool([0, 2], [5.0, 5.0], first_id=10)
        movers, staying = surge.split(np.array([False, True, True]))
        assert staying.ids.tolist() == [0]
        merged = nonsurge.merge(movers)
        assert merged.ids.tolist() == [10, 1, 11, 2]
        assert merged.arrived_at.tolist() == [0, 1, 2, 3]

    def test_operations_leave_receiver_untouched(self):
        pool = make_pool([0, 1], [9.0, 9.0])
        pool.match(1.0, 2)
        pool.split(np.array([True, False]))
        assert len(pool) == 2

    def test_riders(self):
        riders = make_pool([4], [6.5]).riders(Zone.SURGE)
        assert riders == [RiderAgent(id=0, arrived_at=4, wtp=6.5, move_cost=0.0, zone='surge')]
