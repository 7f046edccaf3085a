# test_mab_engine.py
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.core.link_model import DOWNLINK, UPLINK, LinkConfig, LinkSpace
from NbLink.core.mab_engine import (
    MabEngine, MabParams, StatisticTable, TraceRecorder, epsilon, generate_dataset, reward,
    run_synthetic_bandit, select_arm, suboptimal_pull_rate)
from NbLink.core.simulator import SimConfig, Simulator
from NbLink.policies.mab import ObservationWindow
from NbLink.utils.errors import DomainError

A1 = LinkConfig(2, 1, 1)
A2 = LinkConfig(8, 4, 2)


def test_epsilon():
    p = MabParams(c=2, big_k=100, d=0.5)
    assert epsilon(1, p) == 1.0
    assert abs(epsilon(1000, p) - 0.8) < 1e-12
    assert epsilon(10 ** 9, p) < 1e-5
    values = [epsilon(t, p) for t in range(1, 5000, 7)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    try:
        epsilon(0, p)
        assert False, "t=0 accepted"
    except DomainError:
        pass


def test_reward():
    p = MabParams()
    assert abs(reward(0.2, p) - 5.0) < 1e-12
    assert reward(1.0, p) == 1.0
    assert reward(0.0, p) == 1000.0


def test_params_validation():
    for kwargs in ({"c": 0}, {"d": 0.0}, {"delta_db": -1.0}, {"t_d_ms": 0}, {"plr_floor": 0.0},
                   {"table_capacity": 0}):
        try:
            MabParams(**kwargs)
            assert False, f"{kwargs} accepted"
        except DomainError:
            pass


class _Never:
    """rng stand-in whose zeta is always 1, so every play exploits"""
    def random(self):
        return 1.0

    def integers(self, n):
        return 0


def test_select_case1_and_case2():
    table = StatisticTable()
    table.update(10.0, A1, 0.30)
    table.update(10.5, A2, 0.10)
    p = MabParams(c=1, d=1.0, big_k=1)
    arm, mode = select_arm(10.2, 10, table, p, _Never(), (A1, A2))
    assert arm == A2 and mode == "case1"
    arm, mode = select_arm(30.0, 10, table, p, _Never(), (A1, A2))
    assert arm == A2 and mode == "case2"


def test_select_case1_uses_window_only():
    table = StatisticTable()
    table.update(10.0, A1, 0.30)
    table.update(20.0, A2, 0.05)
    p = MabParams(c=1, d=1.0, big_k=1)
    arm, mode = select_arm(10.4, 10, table, p, _Never(), (A1, A2))
    assert arm == A1 and mode == "case1"


def test_exploit_matches_exhaustive_oracle():
    rng = np.random.default_rng(5)
    arms = LinkSpace(max_prb=2).arms(UPLINK)
    table = StatisticTable()
    entries = []
    for k in range(200):
        sinr, arm, plr = float(rng.uniform(0, 30)), arms[int(rng.integers(len(arms)))], float(rng.random())
        table.update(sinr, arm, plr, k)
        entries.append((sinr, arm, plr))
    p = MabParams(c=1, d=1.0, big_k=1)
    for sinr in rng.uniform(-5, 35, size=50):
        arm, _ = select_arm(float(sinr), 10, table, p, _Never(), arms)
        near = [e for e in entries if abs(e[0] - sinr) <= p.delta_db] or entries
        assert min(e[2] for e in near) == min(e[2] for e in near if e[1] == arm)


def test_ties_go_to_most_recent():
    table = StatisticTable()
    table.update(10.0, A1, 0.1, 1)
    table.update(10.0, A2, 0.1, 2)
    assert table.lowest_plr(10.0, 1.0) == (A2, 1)


def test_empty_table_explores():
    table = StatisticTable()
    arm, mode = select_arm(10.0, 10 ** 6, table, MabParams(), _Never(), (A1,))
    assert arm == A1 and mode == "explore"


def test_directions_kept_apart():
    table = StatisticTable()
    table.update(10.0, A1, 0.0, direction=DOWNLINK)
    assert table.lowest_plr(10.0, 1.0, UPLINK) == (None, 0)
    assert table.has_entries(DOWNLINK) and not table.has_entries(UPLINK)


def test_table_update_and_eviction():
    table = StatisticTable(capacity=3)
    table.update(10.0, A1, 0.2, 1)
    assert len(table) == 1
    table.update(10.0, A1, 0.4, 2)
    assert [e.plr for e in table] == [0.2, 0.4]
    table.update(11.0, A2, 0.5, 3)
    table.update(12.0, A2, 0.6, 4)
    assert len(table) == 3
    assert [e.timestamp_ms for e in table] == [2, 3, 4]
    try:
        table.update(10.0, A1, 1.5)
        assert False, "PLR 1.5 accepted"
    except DomainError:
        pass


def test_engine_uses_direction_arm_count():
    space = LinkSpace(max_prb=6)
    engine = MabEngine(MabParams(), space, np.random.default_rng(0))
    assert engine.params_for(UPLINK).big_k == 13 * 8 * 6
    assert engine.params_for(DOWNLINK).big_k == 13 * 12 * 6
    for _ in range(5):
        assert space.is_legal(engine.select(10.0, DOWNLINK), DOWNLINK)
    assert engine.plays == {DOWNLINK: 5}


def test_engine_tracks_reward_and_mode():
    engine = MabEngine(MabParams(), LinkSpace(max_prb=1), _Never())
    arm = engine.select(10.0)
    assert engine.last_mode == "explore" and engine.mode_counts["explore"] == 1
    engine.record(10.0, arm, 0.2, 0)
    engine.record(11.0, arm, 0.0, 100)
    assert abs(engine.cumulative_reward - 1005.0) < 1e-9


def _recorded_trace(arm, count, sinr_db=10.0):
    space = LinkSpace(max_prb=1)
    recorder = TraceRecorder(space, idle_sample_every=1)
    recorder.idle(0)
    for t in range(1, count + 1):
        window = ObservationWindow(arm, UPLINK, sinr_db, t, attempts=4, lost=0)
        recorder.scheduled(t, UPLINK, arm, sinr_db, window)
    return space, recorder.records()


def test_warm_start_continues_experience():
    arm = LinkConfig(4, 2, 1)
    space, records = _recorded_trace(arm, 200)
    engine = MabEngine(MabParams(c=1, d=10.0), space, _Never())
    assert engine.warm_start(records) == 200
    assert engine.plays == {UPLINK: 200} and len(engine.table) == 200
    # K = 104 uplink arms, so eps = 1.04 / 201 on the next play
    assert engine.epsilon(UPLINK) < 0.01
    assert engine.select(10.0) == arm and engine.last_mode == "case1"
    assert engine.select(25.0) == arm and engine.last_mode == "case2"


def test_snapshot_restore():
    space, records = _recorded_trace(A1, 5)
    engine = MabEngine(MabParams(), space, _Never())
    engine.warm_start(records)
    checkpoint = engine.snapshot()
    engine.record(12.0, A1, 0.5, 50)
    engine.select(12.0)
    engine.restore(checkpoint)
    assert engine.plays == {UPLINK: 5} and len(engine.table) == 5
    assert abs(engine.cumulative_reward - 5000.0) < 1e-9


def test_regret_shape():
    # two arms, PLR gap 0.2, window PLR from 50 packets
    pulls = run_synthetic_bandit([0.1, 0.3], plays=20_000, params=MabParams(c=5, d=0.2), seed=0,
                                 packets_per_window=50)
    assert len(pulls) == 20_000
    rate = suboptimal_pull_rate(pulls, best_arm=0)
    print(f"suboptimal pull rate over the final 10%: {rate:.4f}")
    assert rate < 0.05
    assert suboptimal_pull_rate(pulls[:2000], best_arm=0, tail_fraction=1.0) > rate


def test_trace_recorder_normalizes():
    space = LinkSpace(max_prb=6)
    recorder = TraceRecorder(space, idle_sample_every=2)
    window = ObservationWindow(LinkConfig(6, 8, 3), UPLINK, 12.5, 0, attempts=4, lost=1)
    recorder.idle(3)
    recorder.idle(4)
    recorder.scheduled(7, UPLINK, LinkConfig(6, 8, 3), 12.5, window)
    idle, scheduled = recorder.records()
    assert (idle.t_ms, idle.direction, idle.alpha, idle.gamma) == (3, "U", 0, 0.0)
    assert (scheduled.t_ms, scheduled.direction, scheduled.alpha) == (7, "U", 1)
    assert abs(scheduled.gamma - 0.4) < 1e-12
    assert scheduled.m_norm == 0.5 and abs(scheduled.r_norm - 3 / 7) < 1e-12
    assert scheduled.sinr_db == 12.5 and scheduled.plr == 0.25


def _simulator(**overrides):
    values = dict(n_ues=5, duration_ms=400, arrival_rate_per_ue=20.0)
    values.update(overrides)
    return Simulator(SimConfig(**values))


def test_dataset_without_traffic_is_idle_only():
    records = generate_dataset(1, _simulator(arrival_rate_per_ue=0.0, duration_ms=100), MabParams(), seed=1)
    assert len(records) == 10
    assert all(r.alpha == 0 for r in records)


def test_dataset_is_replay_deterministic():
    first = generate_dataset(2, _simulator(), MabParams(t_d_ms=20), seed=3)
    second = generate_dataset(2, _simulator(), MabParams(t_d_ms=20), seed=3)
    assert first == second
    times = [r.t_ms for r in first]
    assert all(a < b for a, b in zip(times, times[1:]))
    assert any(r.alpha == 1 for r in first) and times[-1] >= 400


def test_dataset_engine_learns_across_episodes():
    simulator = _simulator()
    params = MabParams(t_d_ms=20)
    single = MabEngine(params, simulator.link_space, np.random.default_rng(0))
    generate_dataset(1, simulator, params, seed=3, engine=single)
    shared = MabEngine(params, simulator.link_space, np.random.default_rng(0))
    generate_dataset(2, simulator, params, seed=3, engine=shared)
    # episode 0 is identical in both, episode 1 keeps adding to the same table
    assert sum(shared.plays.values()) > sum(single.plays.values()) > 0
    assert len(shared.table) > len(single.table)


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
