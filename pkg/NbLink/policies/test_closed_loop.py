# test_closed_loop.py
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.core.link_model import ChannelModelParams, LinkSpace
from NbLink.core.mab_engine import MabEngine, MabParams, generate_dataset
from NbLink.core.metrics import selection_medians
from NbLink.core.simulator import SimConfig, Simulator, run_policy
from NbLink.gan.trainer import GanSettings, GanTrainer
from NbLink.policies import MabPolicy, SmartConPolicy, StaticPolicy

# Short uplink-only packets on a weak channel: one subframe per repetition,
# and the static MCS 6 rarely gets through.
LOW_SINR = dict(n_ues=5, sinr_range_db=(4.0, 8.0), packet_bits=16, arrival_rate_per_ue=2.0,
                ul_fraction=1.0, tcp_fraction=0.0)
# cK / d^2 = 156 plays of full exploration on 624 uplink arms
FAST_MAB = MabParams(c=1, d=2.0)


def _trained_engine(config, params, channel_params=None, seed=1):
    """An engine after one warm-up run, still learning"""
    engine = MabEngine(params, LinkSpace(), np.random.default_rng(seed))
    run_policy(MabPolicy(engine), config, channel_params, seed=seed)
    return engine


def test_mab_loses_fewer_packets_than_static():
    config = SimConfig(duration_ms=60_000, **LOW_SINR)
    engine = _trained_engine(config, FAST_MAB)
    warm_plays = sum(engine.plays.values())
    mab = run_policy(MabPolicy(engine), config, seed=2)
    static = run_policy(StaticPolicy(), config, seed=2)
    print(f"PLR mab {mab.avg_plr:.3f} static {static.avg_plr:.3f}, modes {engine.mode_counts}")
    assert sum(engine.plays.values()) > warm_plays > 0
    assert engine.mode_counts["case1"] > 0
    assert mab.packets_lost + mab.packets_delivered > 100
    assert mab.avg_plr <= 0.7 * static.avg_plr


def test_smartcon_doubles_static_throughput_at_low_sinr():
    simulator = Simulator(SimConfig(duration_ms=10_000, **LOW_SINR))
    dataset = generate_dataset(1, simulator, FAST_MAB, seed=5)
    settings = GanSettings(hidden=4, sequence_window_ms=1000, show_progress=False)
    model = GanTrainer(settings).train(dataset, epochs=1, seed=5).model

    config = SimConfig(duration_ms=30_000, **LOW_SINR)
    policy = SmartConPolicy(model, seed=5, rho_ms=1000, segment_ms=1000)
    smart = run_policy(policy, config, seed=6)
    static = run_policy(StaticPolicy(), config, seed=6)
    print(f"throughput smartcon {smart.throughput_bps:.1f} static {static.throughput_bps:.1f} bps, "
          f"{policy.predicted_decisions} predicted")
    assert static.packets_generated > 100
    assert smart.throughput_bps >= 2.0 * static.throughput_bps


def _exploit_medians(sinr_range_db, channel_params):
    config = SimConfig(n_ues=10, duration_ms=60_000, sinr_range_db=sinr_range_db, packet_bits=16,
                       arrival_rate_per_ue=5.0, ul_fraction=1.0, tcp_fraction=0.0)
    engine = _trained_engine(config, MabParams(c=1, d=0.8), channel_params)
    policy = MabPolicy(engine)
    run_policy(policy, config, channel_params, seed=2)
    assert len(policy.exploited) > 200
    return selection_medians(policy.exploited, (float("-inf"), float("inf")))


def test_mab_adapts_mcs_and_repetitions_to_sinr():
    # 3 dB per MCS step spreads the feasible arms far enough apart to separate the bands
    channel = ChannelModelParams(slope_db_per_mcs=3.0)
    low_mcs, low_rep = _exploit_medians((5.0, 10.0), channel)
    high_mcs, high_rep = _exploit_medians((20.0, 25.0), channel)
    print(f"median MCS {low_mcs} -> {high_mcs}, median repetitions {low_rep} -> {high_rep}")
    assert low_mcs < high_mcs
    assert low_rep >= high_rep


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
