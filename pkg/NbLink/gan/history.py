# history.py - Event records and event histories for the point-process model
from dataclasses import dataclass

import numpy as np

from NbLink.utils.errors import DatasetError, DomainError


@dataclass(frozen=True)
class EventRecord:
    """
    One time-stamped scheduling label (t, alpha, gamma, delta).

    alpha = 0 carries no configuration, so gamma and both delta
    components must then be exactly zero.
    """
    t_ms: float
    alpha: int
    gamma: float = 0.0
    delta: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.alpha not in (0, 1):
            raise DomainError(f"alpha must be 0 or 1, got {self.alpha}")
        values = (self.gamma,) + tuple(self.delta)
        if len(values) != 3 or not all(0.0 <= v <= 1.0 for v in values):
            raise DomainError(f"Normalized fields outside [0, 1]: gamma={self.gamma} delta={self.delta}")
        if self.alpha == 0 and any(v != 0.0 for v in values):
            raise DomainError(f"Unscheduled event at {self.t_ms} ms carries gamma={self.gamma} delta={self.delta}")


class EventHistory:
    """
    Time-ordered events of one sequence, held as numpy columns.

    Times are seconds from the sequence start; `horizon` is the
    observation length T. `eta` is the noise that drove each event (the
    prior mean for observed data).
    """

    def __init__(self, times, alpha, gamma, m, r, eta, horizon, plr=None, directions=None):
        self.times = np.asarray(times, dtype=float)
        self.alpha = np.asarray(alpha, dtype=float)
        self.gamma = np.asarray(gamma, dtype=float)
        self.m = np.asarray(m, dtype=float)
        self.r = np.asarray(r, dtype=float)
        self.eta = np.asarray(eta, dtype=float)
        self.horizon = float(horizon)
        self.plr = None if plr is None else np.asarray(plr, dtype=float)
        self.directions = None if directions is None else list(directions)

        n = self.times.size
        for name in ("alpha", "gamma", "m", "r", "eta"):
            if getattr(self, name).shape != (n,):
                raise DomainError(f"Column {name} has {getattr(self, name).size} entries, expected {n}")
        if n and np.any(np.diff(self.times) <= 0):
            raise DomainError("Event times must be strictly increasing")
        if n and (self.times[0] < 0 or self.times[-1] >= self.horizon):
            raise DomainError(f"Event times must lie in [0, {self.horizon}) s")

    def __len__(self):
        return int(self.times.size)

    def count(self, t, left_limit=False):
        """
        N(t) = sum of u(t - t_l), right-continuous: an event at t counts.
        `left_limit` gives N(t-), the events strictly before t.
        """
        return int(np.searchsorted(self.times, t, side="left" if left_limit else "right"))

    def records(self, offset_ms=0.0):
        return [EventRecord(offset_ms + 1000.0 * t, int(a), float(g), (float(m), float(r)))
                for t, a, g, m, r in zip(self.times, self.alpha, self.gamma, self.m, self.r)]

    @classmethod
    def empty(cls, horizon):
        return cls([], [], [], [], [], [], horizon)

    @classmethod
    def from_events(cls, events, horizon, eta=0.0):
        """History from EventRecords whose t_ms is relative to the sequence start"""
        if not events:
            return cls.empty(horizon)
        return cls([e.t_ms / 1000.0 for e in events], [e.alpha for e in events],
                   [e.gamma for e in events], [e.delta[0] for e in events],
                   [e.delta[1] for e in events], [eta] * len(events), horizon)


def sequences_from_records(records, window_ms, eta):
    """
    Cut a dataset (DatasetRecords in time order) into histories of
    `window_ms` each. Windows without records are skipped; event times
    become seconds from the window start and `eta` fills the noise column.
    """
    if window_ms <= 0:
        raise DomainError(f"sequence window must be > 0 ms, got {window_ms}")
    if not records:
        raise DatasetError("Dataset holds no records")
    times = np.array([rec.t_ms for rec in records], dtype=float)
    if np.any(np.diff(times) <= 0):
        raise DatasetError("Dataset times must be strictly increasing")
    window_index = np.floor(times / window_ms).astype(np.int64)
    sequences = []
    for index in np.unique(window_index):
        rows = [records[i] for i in np.flatnonzero(window_index == index)]
        start = index * window_ms
        sequences.append(EventHistory(
            [(rec.t_ms - start) / 1000.0 for rec in rows],
            [rec.alpha for rec in rows],
            [rec.gamma for rec in rows],
            [rec.m_norm for rec in rows],
            [rec.r_norm for rec in rows],
            [eta] * len(rows),
            window_ms / 1000.0,
            plr=[rec.plr for rec in rows],
            directions=[rec.direction for rec in rows]))
    return sequences


def split_sequences(sequences, rng, fractions=(0.6, 0.2, 0.2), minimum=5):
    """
    Shuffle and split into (train, test, validation). Fewer than `minimum`
    sequences all go to training.
    """
    if len(sequences) < minimum:
        return list(sequences), [], []
    order = rng.permutation(len(sequences))
    n_train = int(round(fractions[0] * len(sequences)))
    n_test = int(round(fractions[1] * len(sequences)))
    train = [sequences[i] for i in order[:n_train]]
    test = [sequences[i] for i in order[n_train:n_train + n_test]]
    validation = [sequences[i] for i in order[n_train + n_test:]]
    return train, test, validation
