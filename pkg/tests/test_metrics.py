import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from avcoord.config import EngineConfig
from avcoord.engine import make_world
from avcoord.metrics import RunMetrics, RunSummary, batch_stats, run_summary

from helpers import GrantAll, small_world, straight_route


def test_leader_wait_then_entry_is_one_cwt_event():
    m = RunMetrics(1)
    for _ in range(7):  # leader from step 100, entering at 107
        m.record_wait(0, lead_idle=True, lead_blocked=False)
    m.on_grant(0)
    m.on_enter(0)
    assert m.cwt_events == [7] and m.twt_episodes == []


def test_never_waiting_vehicle_records_nothing():
    m = RunMetrics(1)
    m.on_enter(0)
    m.on_grant(0)
    assert run_summary(m) == RunSummary(0.0, 0.0)


def test_queue_then_lead_is_one_episode_of_each():
    m = RunMetrics(1)
    for _ in range(20):  # third in line
        m.record_wait(0, False, False)
    for _ in range(5):  # lane leader, intersection idle
        m.record_wait(0, True, False)
    m.on_grant(0)
    m.on_enter(0)
    assert m.twt_episodes == [20] and m.cwt_events == [5]


def test_leader_held_by_traffic_counts_as_twt():
    m = RunMetrics(1)
    for _ in range(4):
        m.record_wait(0, False, True)
    m.record_wait(0, True, False)
    m.on_grant(0)
    m.on_enter(0)
    assert m.cwt_events == [1] and m.twt_episodes == [4]


def test_open_timers_are_dropped():
    m = RunMetrics(2)
    m.record_wait(0, True, False)
    m.record_wait(1, False, False)
    assert run_summary(m).cwt_events == 0 and run_summary(m).twt_episodes == 0


def test_run_summary_means():
    m = RunMetrics()
    m.cwt_events = [7, 9, 14]
    assert run_summary(m).cwt_mean == 10.0
    assert run_summary(RunMetrics()).twt_mean == 0.0


def test_summary_mean_of_synthetic_events():
    rng = random.Random(123)
    m = RunMetrics()
    n, mu = 10**4, 12.0
    m.twt_episodes = [rng.expovariate(1.0 / mu) for _ in range(n)]
    # exponential: sigma equals the mean
    assert abs(run_summary(m).twt_mean - mu) <= 2.0 * mu / math.sqrt(n)


def summaries(values):
    return [RunSummary(v, v) for v in values]


def test_batch_stats_of_equal_runs():
    st_ = batch_stats(summaries([10.0, 10.0, 10.0]))
    assert (st_.cwt_mean, st_.cwt_std, st_.sigma_valid) == (10.0, 0.0, True)


def test_batch_stats_sample_sigma():
    st_ = batch_stats(summaries([8.0, 12.0]))
    assert st_.twt_mean == 10.0
    assert st_.twt_std == pytest.approx(math.sqrt(8.0), rel=1e-12)
    assert round(st_.twt_std, 3) == 2.828


def test_single_run_sigma_is_flagged():
    st_ = batch_stats(summaries([4.5]))
    assert (st_.cwt_mean, st_.cwt_std, st_.sigma_valid) == (4.5, 0.0, False)


def test_batch_stats_needs_runs():
    with pytest.raises(ValueError):
        batch_stats([])


@given(st.lists(st.floats(0, 1e4), min_size=1, max_size=20))
def test_batch_mean_within_range(values):
    s = batch_stats(summaries(values))
    assert min(values) - 1e-9 <= s.cwt_mean <= max(values) + 1e-9
    assert s.cwt_std >= 0.0


# -- timers driven by the engine ---------------------------------------------

class GrantFrom(GrantAll):
    def __init__(self, start):
        self.start = start

    def decide(self, world):
        return super().decide(world) if world.clock >= self.start else {}


def test_withheld_grant_is_measured_as_cwt():
    world = small_world(3, 3)
    e = world.grid.edge_between(3, 4)
    world.add_vehicle(e, 100.0, straight_route(world, e))
    world.run(GrantFrom(7), 20)
    assert world.metrics.cwt_events == [7]
    assert world.metrics.twt_episodes == []


def test_follower_queue_time_is_twt():
    world = small_world(3, 3)
    e = world.grid.edge_between(3, 4)
    route = straight_route(world, e)
    world.add_vehicle(e, 100.0, route)
    back = world.add_vehicle(e, 92.5, route)
    world.run(GrantFrom(6), 40)
    # the follower waited as leader only while the box was busy: zero mechanism delay
    assert world.metrics.cwt_events == [6, 0]
    # the follower queued 6 steps, then waited behind the busy box until it could go
    assert len(world.metrics.twt_episodes) == 1
    assert world.metrics.twt_episodes[0] >= 6
    assert back.edges_done >= 1


class CountingMetrics(RunMetrics):
    def __init__(self, n):
        super().__init__(n)
        self.calls = {}
        self.clock = 0

    def record_wait(self, vid, lead_idle, lead_blocked):
        key = (self.clock, vid)
        self.calls[key] = self.calls.get(key, 0) + 1
        super().record_wait(vid, lead_idle, lead_blocked)

    def on_step(self, world):
        self.clock = world.clock
        super().on_step(world)


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_each_waiting_step_is_charged_once(seed):
    strategy = GrantAll()
    world = make_world(EngineConfig(), 120, seed, strategy)
    counting = CountingMetrics(len(world.vehicles))
    world.metrics = counting
    world.run(strategy, 300)
    assert max(counting.calls.values()) == 1
    entries = sum(v.edges_done for v in world.vehicles)
    assert len(counting.cwt_events) <= entries
    assert all(x >= 0 for x in counting.cwt_events + counting.twt_episodes)
