# mab_engine.py - epsilon-greedy M-R-P selection and training-trace generation
"""
The learning agent behind the training dataset.

Each play draws zeta ~ U(0, 1). With probability 1 - eps_t the agent
exploits the statistic table: Case-1 looks at entries whose SINR lies
within delta_db of the present SINR and returns the arm with the lowest
PLR there; Case-2 falls back to the lowest PLR in the whole table when
that subset is empty. Otherwise (or while the table is still empty,
the initial stage) it explores a uniformly random arm.
"""
from copy import deepcopy
from dataclasses import dataclass, replace

import numpy as np

from NbLink.core.link_model import UPLINK, DOWNLINK, CODE_DIRECTIONS, DIRECTION_CODES, LinkConfig, repetition_set
from NbLink.utils.errors import DomainError, SimulationError
from NbLink.utils.log_service import LoggingService


@dataclass(frozen=True)
class StatEntry:
    sinr_db: float
    arm: LinkConfig
    plr: float
    timestamp_ms: int
    direction: str = UPLINK


@dataclass(frozen=True)
class MabParams:
    c: int = 5
    d: float = 0.1
    big_k: int = 13 * 8 * 6
    delta_db: float = 1.0
    t_d_ms: int = 100
    plr_floor: float = 1e-3
    table_capacity: int = 100_000

    def __post_init__(self):
        if self.c < 1:
            raise DomainError(f"c must be >= 1, got {self.c}")
        if not self.d > 0:
            raise DomainError(f"d must be > 0, got {self.d}")
        if self.big_k < 1:
            raise DomainError(f"big_k must be >= 1, got {self.big_k}")
        if not self.delta_db > 0:
            raise DomainError(f"delta_db must be > 0, got {self.delta_db}")
        if self.t_d_ms < 1:
            raise DomainError(f"t_d_ms must be >= 1, got {self.t_d_ms}")
        if not self.plr_floor > 0:
            raise DomainError(f"plr_floor must be > 0, got {self.plr_floor}")
        if self.table_capacity < 1:
            raise DomainError(f"table_capacity must be >= 1, got {self.table_capacity}")


def epsilon(t, p):
    """Exploration probability eps_t = min(1, cK / (d^2 t))"""
    if t < 1:
        raise DomainError(f"play index must be >= 1, got {t}")
    return min(1.0, p.c * p.big_k / (p.d * p.d * t))


def reward(plr, p):
    """Inverse PLR, capped at 1/plr_floor"""
    if not 0.0 <= plr <= 1.0:
        raise DomainError(f"PLR {plr} outside [0, 1]")
    return 1.0 / max(plr, p.plr_floor)


class StatisticTable:
    """
    The statistic table S = {SINR, arm, PLR}, stored as a ring buffer.

    Entries are kept in numpy columns so that Case-1/Case-2 lookups are
    vectorized; once `capacity` entries exist the oldest is evicted.
    """

    def __init__(self, capacity=100_000):
        self.capacity = int(capacity)
        self._sinr = np.zeros(self.capacity)
        self._plr = np.zeros(self.capacity)
        self._stamp = np.zeros(self.capacity, dtype=np.int64)
        self._seq = np.zeros(self.capacity, dtype=np.int64)
        self._dir = np.zeros(self.capacity, dtype=np.int8)
        self._arms = [None] * self.capacity
        self._size = 0
        self._next = 0
        self._count = 0  # total updates ever, gives recency order

    def __len__(self):
        return self._size

    def __iter__(self):
        """Entries oldest first"""
        start = self._next if self._size == self.capacity else 0
        for k in range(self._size):
            yield self._entry((start + k) % self.capacity)

    def _entry(self, i):
        direction = UPLINK if self._dir[i] == 0 else DOWNLINK
        return StatEntry(float(self._sinr[i]), self._arms[i], float(self._plr[i]),
                         int(self._stamp[i]), direction)

    def update(self, sinr_db, arm, plr, timestamp_ms=0, direction=UPLINK):
        """Append one observation; never overwrites except by ring eviction"""
        if not 0.0 <= plr <= 1.0:
            raise DomainError(f"PLR {plr} outside [0, 1]")
        i = self._next
        self._sinr[i] = sinr_db
        self._plr[i] = plr
        self._stamp[i] = timestamp_ms
        self._seq[i] = self._count
        self._dir[i] = 0 if repetition_set(direction).direction == UPLINK else 1
        self._arms[i] = arm
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)
        self._count += 1

    def has_entries(self, direction=UPLINK):
        code = 0 if repetition_set(direction).direction == UPLINK else 1
        return bool(np.any(self._dir[:self._size] == code))

    def lowest_plr(self, sinr_db, delta_db, direction=UPLINK):
        """
        Arm of the lowest-PLR entry within [sinr - delta, sinr + delta]
        (Case-1) or over the whole table when that window is empty
        (Case-2). Ties go to the most recent entry. Returns (arm, case)
        or (None, 0) when the table holds nothing for the direction.
        """
        n = self._size
        code = 0 if repetition_set(direction).direction == UPLINK else 1
        same_dir = self._dir[:n] == code
        if not same_dir.any():
            return None, 0
        window = same_dir & (np.abs(self._sinr[:n] - sinr_db) <= delta_db)
        case = 1 if window.any() else 2
        candidates = np.flatnonzero(window if case == 1 else same_dir)
        plrs = self._plr[candidates]
        tied = candidates[plrs == plrs.min()]
        best = tied[np.argmax(self._seq[tied])]
        return self._arms[best], case


def select_arm(sinr_db, t, table, p, rng, arms, direction=UPLINK):
    """
    One play of the epsilon-greedy rule. Exploits when zeta > eps_t;
    an empty table (initial stage) always explores.

    Returns (arm, mode) where mode is "case1", "case2" or "explore".
    """
    zeta = rng.random()
    eps = epsilon(t, p)
    if zeta > eps:
        arm, case = table.lowest_plr(sinr_db, p.delta_db, direction)
        if arm is not None:
            return arm, f"case{case}"
    return arms[int(rng.integers(len(arms)))], "explore"


def update(table, sinr_db, arm, plr, timestamp_ms=0, direction=UPLINK):
    table.update(sinr_db, arm, plr, timestamp_ms, direction)


class MabEngine:
    """
    ε-greedy agent for one eNB, holding the statistic table and play counters

    The table and counters outlive a single simulation run: the same
    engine can drive several episodes, and `warm_start` replays a recorded
    trace so a later run continues in the experience stage.
    """

    def __init__(self, params, link_space, rng, logger=None):
        self.params = params
        self.link_space = link_space
        self.rng = rng
        self.table = StatisticTable(params.table_capacity)
        self.plays = {}
        self.mode_counts = {"case1": 0, "case2": 0, "explore": 0}
        self.last_mode = None
        self.cumulative_reward = 0.0

        self._logger = logger or LoggingService(__name__)
        self.log = self._logger.info
        self._direction_params = {}

    def params_for(self, direction):
        """MabParams with K set to the arm count of the direction"""
        key = repetition_set(direction).direction
        if key not in self._direction_params:
            self._direction_params[key] = replace(self.params, big_k=self.link_space.arm_count(key))
        return self._direction_params[key]

    def epsilon(self, direction=UPLINK):
        """Exploration probability of the next play in `direction`"""
        key = repetition_set(direction).direction
        return epsilon(self.plays.get(key, 0) + 1, self.params_for(key))

    def select(self, sinr_db, direction=UPLINK):
        key = repetition_set(direction).direction
        self.plays[key] = self.plays.get(key, 0) + 1
        arm, mode = select_arm(sinr_db, self.plays[key], self.table, self.params_for(key),
                               self.rng, self.link_space.arms(key), key)
        self.mode_counts[mode] += 1
        self.last_mode = mode
        return arm

    def record(self, sinr_db, arm, plr, timestamp_ms=0, direction=UPLINK):
        update(self.table, sinr_db, arm, plr, timestamp_ms, direction)
        self.cumulative_reward += reward(plr, self.params)

    def warm_start(self, records):
        """
        Replay the scheduled records of a dataset into the table. Each one
        counts as a play of its direction, so exploration resumes where
        the recorded run left it.
        """
        replayed = 0
        for rec in records:
            if not rec.alpha:
                continue
            direction = CODE_DIRECTIONS[rec.direction]
            arm = self.link_space.denormalize(rec.gamma, rec.m_norm, rec.r_norm, direction)
            self.record(rec.sinr_db, arm, rec.plr, int(rec.t_ms), direction)
            self.plays[direction] = self.plays.get(direction, 0) + 1
            replayed += 1
        self.log(f"Warm start: {replayed} plays replayed, table size {len(self.table)}, "
                 f"next uplink eps {self.epsilon(UPLINK):.4f}")
        return replayed

    def snapshot(self):
        return deepcopy((self.table, self.plays, self.mode_counts, self.cumulative_reward))

    def restore(self, snapshot):
        self.table, self.plays, self.mode_counts, self.cumulative_reward = deepcopy(snapshot)


# Synthetic bandit used for the regret-shape experiment

class SyntheticBandit:
    """Stationary bandit whose window PLR is Binomial(n, plr_arm) / n"""

    def __init__(self, plrs, packets_per_window, rng):
        self.plrs = np.asarray(plrs, dtype=float)
        self.packets_per_window = int(packets_per_window)
        self.rng = rng

    def observe(self, arm_index):
        lost = self.rng.binomial(self.packets_per_window, self.plrs[arm_index])
        return lost / self.packets_per_window


def run_synthetic_bandit(plrs, plays, params, seed, packets_per_window=50, sinr_db=10.0):
    """
    Play the epsilon-greedy rule against a SyntheticBandit at a constant
    SINR. Arms are labelled LinkConfig(i, 1, 1). Returns the pulled arm
    indices in play order.
    """
    rng = np.random.default_rng(seed)
    bandit = SyntheticBandit(plrs, packets_per_window, rng)
    arms = tuple(LinkConfig(i, 1, 1) for i in range(len(plrs)))
    p = replace(params, big_k=len(arms))
    table = StatisticTable(params.table_capacity)
    pulls = np.zeros(plays, dtype=np.int64)
    for t in range(1, plays + 1):
        arm, _ = select_arm(sinr_db, t, table, p, rng, arms)
        plr = bandit.observe(arm.mcs)
        update(table, sinr_db, arm, plr, t)
        pulls[t - 1] = arm.mcs
    return pulls


def suboptimal_pull_rate(pulls, best_arm, tail_fraction=0.1):
    tail = pulls[int(len(pulls) * (1 - tail_fraction)):]
    return float(np.mean(tail != best_arm)) if len(tail) else 0.0


# Training-trace generation

class TraceRecorder:
    """
    Collects dataset records for one episode. Scheduled transmissions
    produce alpha=1 records whose PLR is resolved from the MAB window
    they belonged to once the episode ends; every `idle_sample_every`-th
    idle subframe produces an alpha=0 record.
    """

    def __init__(self, link_space, idle_sample_every=10, time_offset_ms=0):
        self.link_space = link_space
        self.idle_sample_every = max(1, int(idle_sample_every))
        self.time_offset_ms = time_offset_ms
        self._pending = []
        self._idle_seen = 0

    def scheduled(self, t_ms, direction, cfg, sinr_db, window=None):
        self._pending.append((t_ms, direction, cfg, sinr_db, window))

    def idle(self, t_ms):
        if self._idle_seen % self.idle_sample_every == 0:
            self._pending.append((t_ms, None, None, None, None))
        self._idle_seen += 1

    def records(self):
        from NbLink.core.file_system import DatasetRecord

        rows = []
        for t_ms, direction, cfg, sinr_db, window in self._pending:
            t = t_ms + self.time_offset_ms
            if cfg is None:
                rows.append(DatasetRecord(t, "U", 0, 0.0, 0.0, 0.0, 0.0, 0.0))
                continue
            gamma, m_norm, r_norm = self.link_space.normalize(cfg, direction)
            plr = window.plr if window is not None else 0.0
            rows.append(DatasetRecord(t, DIRECTION_CODES[repetition_set(direction).direction], 1,
                                      gamma, m_norm, r_norm, sinr_db, plr))
        return rows


def generate_dataset(episodes, simulator, params, seed, idle_sample_every=10, engine=None, logger=None):
    """
    Run `episodes` MAB-driven simulation episodes and return the
    concatenated trace. Episode e starts at e * duration_ms so the trace
    is one strictly increasing time series. One engine learns across all
    episodes; each episode only reseeds its exploration draws. A
    SimulationError aborts only its own episode: the partial trace is
    dropped and the engine is rolled back to where the episode began.
    """
    from NbLink.policies.mab import MabPolicy
    from NbLink.utils.rng import SeedStreams

    if episodes < 1:
        raise DomainError(f"episodes must be >= 1, got {episodes}")
    log = logger or LoggingService(__name__)
    streams = SeedStreams(seed)
    if engine is None:
        engine = MabEngine(params, simulator.link_space, streams.generator("mab", 0), logger=log)
    records = []
    for episode in range(episodes):
        engine.rng = streams.generator("mab", episode)
        checkpoint = engine.snapshot()
        policy = MabPolicy(engine, logger=log)
        recorder = TraceRecorder(simulator.link_space, idle_sample_every,
                                 time_offset_ms=episode * simulator.config.duration_ms)
        try:
            simulator.run(policy, seed=streams.child_seed("traffic", episode), recorder=recorder)
        except SimulationError as e:
            log.error(f"Episode {episode} aborted, trace discarded: {e}")
            engine.restore(checkpoint)
            continue
        episode_records = recorder.records()
        log.info(f"Episode {episode}: {len(episode_records)} records, "
                 f"plays={sum(engine.plays.values())} modes={engine.mode_counts} "
                 f"eps(U)={engine.epsilon(UPLINK):.4f}")
        records.extend(episode_records)
    return records
