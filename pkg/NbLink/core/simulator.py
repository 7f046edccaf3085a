# simulator.py - Subframe-level closed-loop NB-IoT scheduling simulation
"""
One eNB, one transmission opportunity per 1 ms subframe, one UE served
at a time. Each subframe the per-UE SINR takes a bounded random-walk
step, new packets join their UE queues, and if the eNB is free a UE is
picked (proportional fair, or FIFO for the static baseline), the policy
chooses an M-R-P configuration and the transmission occupies
subframes_needed(...) subframes. Delivery is one Bernoulli draw with
the success probability at the repetition-combined SINR.
"""
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from NbLink.core.link_model import (
    UPLINK, DOWNLINK, ChannelModelParams, LinkSpace, best_feasible_mcs, effective_sinr,
    subframes_needed, success_probability)
from NbLink.core.metrics import MetricsReport
from NbLink.utils.errors import DomainError, SimulationError
from NbLink.utils.log_service import LoggingService
from NbLink.utils.rng import SeedStreams


@dataclass(frozen=True)
class SimConfig:
    n_ues: int = 50
    duration_ms: int = 200_000
    sinr_range_db: tuple = (5.0, 25.0)
    packet_bits: int = 800
    arrival_rate_per_ue: float = 2.0
    ul_fraction: float = 0.5
    tcp_fraction: float = 0.2
    sinr_step_db: float = 0.5
    initial_sinr_db: Optional[float] = None
    pf_horizon: int = 100

    def __post_init__(self):
        low, high = self.sinr_range_db
        if self.n_ues < 1:
            raise DomainError(f"n_ues must be >= 1, got {self.n_ues}")
        if self.duration_ms < 1:
            raise DomainError(f"duration_ms must be >= 1, got {self.duration_ms}")
        if not low < high:
            raise DomainError(f"SINR range needs low < high, got {self.sinr_range_db}")
        if self.packet_bits < 1:
            raise DomainError(f"packet_bits must be >= 1, got {self.packet_bits}")
        if self.arrival_rate_per_ue < 0:
            raise DomainError(f"arrival_rate_per_ue must be >= 0, got {self.arrival_rate_per_ue}")
        for key in ("ul_fraction", "tcp_fraction"):
            if not 0.0 <= getattr(self, key) <= 1.0:
                raise DomainError(f"{key} must lie in [0, 1], got {getattr(self, key)}")
        if self.sinr_step_db < 0:
            raise DomainError(f"sinr_step_db must be >= 0, got {self.sinr_step_db}")
        if self.pf_horizon < 1:
            raise DomainError(f"pf_horizon must be >= 1, got {self.pf_horizon}")


@dataclass
class Packet:
    id: int
    ue: int
    arrival_ms: int
    direction: str
    reliable: bool
    attempts: int = 0


@dataclass
class UeState:
    id: int
    queue: deque = field(default_factory=deque)
    ewma_rate: float = 1.0
    sinr_db: float = 0.0
    ewma_updated_ms: int = 0


@dataclass(frozen=True)
class TxOutcome:
    delivered: bool
    subframes: int


# Operations

def channel_step(sinr_db, rng, config):
    """One subframe of the bounded SINR walk; works on scalars and arrays"""
    low, high = config.sinr_range_db
    if config.sinr_step_db == 0:
        return sinr_db
    step = rng.normal(0.0, config.sinr_step_db, size=np.shape(sinr_db))
    moved = np.clip(sinr_db + step, low, high)
    return float(moved) if np.ndim(moved) == 0 else moved


def instantaneous_rate(sinr_db, params):
    """Bits/s at the best feasible MCS with one PRB"""
    return params.tbs_bits[best_feasible_mcs(sinr_db, params)] * 1000.0


def proportional_fair_select(ues, params=None):
    """Backlogged UE maximizing rate/ewma_rate; ties go to the lowest id"""
    params = params or ChannelModelParams()
    best_id, best_metric = None, -1.0
    for ue in sorted(ues, key=lambda u: u.id):
        if not ue.queue:
            continue
        metric = instantaneous_rate(ue.sinr_db, params) / max(ue.ewma_rate, 1.0)
        if metric > best_metric:
            best_id, best_metric = ue.id, metric
    return best_id


def fifo_select(ues):
    """UE holding the oldest head-of-line packet; ties go to the lowest id"""
    best_id, best_arrival = None, None
    for ue in sorted(ues, key=lambda u: u.id):
        if not ue.queue:
            continue
        arrival = ue.queue[0].arrival_ms
        if best_arrival is None or arrival < best_arrival:
            best_id, best_arrival = ue.id, arrival
    return best_id


def transmit(packet_bits, cfg, sinr_db, rng, params):
    """Spend subframes_needed(...) subframes; deliver with the combined-SINR success probability"""
    subframes = subframes_needed(packet_bits, cfg, params)
    p = success_probability(effective_sinr(sinr_db, cfg.repetitions), cfg.mcs, params)
    return TxOutcome(bool(rng.random() < p), subframes)


class Simulator:
    """
    Closed-loop subframe simulation of one eNB

    A run is single-threaded and fully determined by (seed, policy):
    channel walk, traffic and transmission outcomes each draw from their
    own named substream.
    """

    def __init__(self, config, channel_params=None, link_space=None, logger=None):
        self.config = config
        self.channel_params = channel_params or ChannelModelParams()
        self.link_space = link_space or LinkSpace()

        self._logger = logger or LoggingService(__name__)
        self.log = self._logger.info

    def generate_traffic(self, rng):
        """Poisson arrivals per UE over the run, sorted by (arrival_ms, ue)"""
        cfg = self.config
        packets = []
        for ue in range(cfg.n_ues):
            count = rng.poisson(cfg.arrival_rate_per_ue * cfg.duration_ms / 1000.0)
            times = np.sort(rng.uniform(0.0, cfg.duration_ms, size=count)).astype(np.int64)
            uplink = rng.random(count) < cfg.ul_fraction
            reliable = rng.random(count) < cfg.tcp_fraction
            for t, ul, rel in zip(times, uplink, reliable):
                packets.append((int(t), ue, UPLINK if ul else DOWNLINK, bool(rel)))
        packets.sort(key=lambda p: (p[0], p[1]))
        return [Packet(i, ue, t, d, rel) for i, (t, ue, d, rel) in enumerate(packets)]

    def run(self, policy, seed, recorder=None):
        cfg = self.config
        params = self.channel_params
        streams = SeedStreams(seed)
        walk_rng = streams.generator("channel", 0)
        tx_rng = streams.generator("channel", 1)
        packets = self.generate_traffic(streams.generator("traffic"))

        low, high = cfg.sinr_range_db
        if cfg.initial_sinr_db is not None:
            sinr = np.full(cfg.n_ues, float(np.clip(cfg.initial_sinr_db, low, high)))
        else:
            sinr = walk_rng.uniform(low, high, size=cfg.n_ues)
        ues = [UeState(i) for i in range(cfg.n_ues)]
        decay = 1.0 - 1.0 / cfg.pf_horizon

        policy.start(self.link_space, params)
        next_arrival = 0
        backlog = 0
        busy_until = 0
        consumed = 0
        delivered = lost = 0
        delivered_bits = 0
        in_flight = []  # (completion_ms, packet, delivered), completion order
        delays = []
        selections = []
        decision_seconds = 0.0
        decisions = 0

        for t in range(cfg.duration_ms):
            if t > 0:
                sinr = channel_step(sinr, walk_rng, cfg)
            while next_arrival < len(packets) and packets[next_arrival].arrival_ms <= t:
                pkt = packets[next_arrival]
                ues[pkt.ue].queue.append(pkt)
                backlog += 1
                next_arrival += 1
            # Transmissions finishing by now are settled
            while in_flight and in_flight[0][0] <= t:
                done_ms, pkt, ok = in_flight.pop(0)
                if ok:
                    delivered += 1
                    delivered_bits += cfg.packet_bits
                    delays.append(done_ms - pkt.arrival_ms)
                elif pkt.reliable and pkt.attempts == 1:
                    ues[pkt.ue].queue.appendleft(pkt)
                    backlog += 1
                else:
                    lost += 1

            if t < busy_until:
                continue
            if backlog == 0:
                if recorder is not None:
                    recorder.idle(t)
                continue

            for i in range(cfg.n_ues):
                ues[i].sinr_db = float(sinr[i])
                if ues[i].queue:
                    self._decay_ewma(ues[i], t, decay)
            if policy.scheduler == "fifo":
                ue_id = fifo_select(ues)
            else:
                ue_id = proportional_fair_select(ues, params)
            if ue_id is None:
                raise SimulationError(f"Backlog of {backlog} with every queue empty at {t} ms")
            ue = ues[ue_id]
            pkt = ue.queue.popleft()
            backlog -= 1

            started = time.perf_counter()
            link_cfg = policy.choose(ue_id, pkt.direction, ue.sinr_db, t)
            decision_seconds += time.perf_counter() - started
            decisions += 1
            if not self.link_space.is_legal(link_cfg, pkt.direction):
                raise SimulationError(f"Policy {policy.name} chose illegal {link_cfg} for {pkt.direction}")

            outcome = transmit(cfg.packet_bits, link_cfg, ue.sinr_db, tx_rng, params)
            pkt.attempts += 1
            consumed += outcome.subframes
            busy_until = t + outcome.subframes
            in_flight.append((busy_until, pkt, outcome.delivered))
            policy.observe(ue_id, pkt.direction, outcome.delivered, t)
            if recorder is not None:
                recorder.scheduled(t, pkt.direction, link_cfg, ue.sinr_db,
                                   policy.current_window(ue_id, pkt.direction))
            selections.append((ue.sinr_db, link_cfg.mcs, link_cfg.repetitions, link_cfg.prb_count))
            # PF average credits the scheduled bits in the decision subframe
            ue.ewma_rate = decay * ue.ewma_rate + (1.0 - decay) * cfg.packet_bits * 1000.0

        policy.finish(cfg.duration_ms)
        queued = backlog + len(in_flight)
        attempted = delivered + lost
        report = MetricsReport(
            policy=policy.name,
            n_ues=cfg.n_ues,
            seed=int(seed),
            throughput_bps=delivered_bits / (cfg.duration_ms / 1000.0),
            avg_plr=lost / attempted if attempted else 0.0,
            avg_delay_ms=float(np.mean(delays)) if delays else 0.0,
            delay_samples=sorted(delays),
            consumed_subframes=consumed,
            packets_generated=len(packets),
            packets_delivered=delivered,
            packets_lost=lost,
            packets_queued=queued + (len(packets) - next_arrival),
            retrain_signals=getattr(policy, "retrain_signals", 0),
            fallback_decisions=getattr(policy, "fallback_decisions", 0),
            selections=selections,
            decision_time_us=1e6 * decision_seconds / decisions if decisions else 0.0,
        )
        self.log(f"{policy.name}: n_ues={cfg.n_ues} throughput={report.throughput_bps:.1f} bps "
                 f"plr={report.avg_plr:.4f} delay={report.avg_delay_ms:.1f} ms "
                 f"subframes={consumed} delivered={delivered} lost={lost} queued={report.packets_queued}")
        return report

    @staticmethod
    def _decay_ewma(ue, t, decay):
        elapsed = t - ue.ewma_updated_ms
        if elapsed > 0:
            ue.ewma_rate = max(ue.ewma_rate * decay ** elapsed, 1.0)
            ue.ewma_updated_ms = t


def run_policy(policy, config, channel_params=None, link_space=None, seed=0, logger=None):
    """Build a Simulator for `config` and run one policy instance through it"""
    simulator = Simulator(config, channel_params, link_space, logger=logger)
    return simulator.run(policy, seed)
