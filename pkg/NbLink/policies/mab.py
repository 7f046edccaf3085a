# mab.py - Policy wrapper driving the epsilon-greedy engine from the simulator
from dataclasses import dataclass

from NbLink.core.link_model import LinkConfig, repetition_set
from NbLink.policies.base import Policy


@dataclass
class ObservationWindow:
    """One arm applied to one UE for t_d ms"""
    arm: LinkConfig
    direction: str
    sinr_db: float
    start_ms: int
    attempts: int = 0
    lost: int = 0

    @property
    def plr(self):
        return self.lost / self.attempts if self.attempts else 0.0


class MabPolicy(Policy):
    """
    Each (UE, direction) keeps the arm it was given for t_d ms. When the
    UE is next served after the window has run out, the window's PLR is
    written to the statistic table and a fresh arm is selected.
    """

    name = "mab"
    scheduler = "pf"

    def __init__(self, engine, logger=None):
        super().__init__(logger)
        self.engine = engine
        self._windows = {}
        self.windows_closed = 0
        # (sinr, mcs, rep) of every arm picked from the table rather than at random
        self.exploited = []

    def _key(self, ue, direction):
        return ue, repetition_set(direction).direction

    def choose(self, ue, direction, sinr_db, t_ms):
        key = self._key(ue, direction)
        window = self._windows.get(key)
        if window is not None and t_ms - window.start_ms >= self.engine.params.t_d_ms:
            self._close(window)
            window = None
        if window is None:
            arm = self.engine.select(sinr_db, key[1])
            if self.engine.last_mode != "explore":
                self.exploited.append((sinr_db, arm.mcs, arm.repetitions))
            window = ObservationWindow(arm, key[1], sinr_db, t_ms)
            self._windows[key] = window
        return window.arm

    def observe(self, ue, direction, delivered, t_ms):
        window = self._windows[self._key(ue, direction)]
        window.attempts += 1
        if not delivered:
            window.lost += 1

    def current_window(self, ue, direction):
        return self._windows.get(self._key(ue, direction))

    def finish(self, t_ms):
        for window in self._windows.values():
            self._close(window)
        self._windows = {}
        self.log(f"MAB run finished: {self.windows_closed} windows, table size {len(self.engine.table)}, "
                 f"modes {self.engine.mode_counts}, cumulative reward {self.engine.cumulative_reward:.1f}")

    def _close(self, window):
        if window.attempts == 0:
            return
        self.engine.record(window.sinr_db, window.arm, window.plr, window.start_ms, window.direction)
        self.windows_closed += 1
