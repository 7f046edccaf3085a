# smartcon.py - Policy applying the trained generator's predicted schedule
import bisect

from NbLink.core.link_model import UPLINK
from NbLink.gan.sampler import OGATA_WINDOW_S, predict_schedule
from NbLink.policies.base import Policy
from NbLink.policies.threshold import ThresholdPolicy
from NbLink.utils.errors import DomainError
from NbLink.utils.rng import SeedStreams


class SmartConPolicy(Policy):
    """
    Once per window rho the generator predicts the scheduling events of
    the next rho ms. A transmission at t uses the configuration of the
    latest predicted event at or before t when that event is scheduled;
    otherwise the threshold baseline decides (counted as a fallback).
    """

    name = "smartcon"
    scheduler = "pf"

    def __init__(self, model, seed=0, rho_ms=60_000, segment_ms=10_000, window_s=OGATA_WINDOW_S,
                 fallback=None, monitor=None, logger=None):
        super().__init__(logger)
        if model is None:
            raise DomainError("smartcon needs a trained model")
        if rho_ms < 1:
            raise DomainError(f"rho_ms must be >= 1, got {rho_ms}")
        self.model = model
        self.seed = int(seed)
        self.rho_ms = int(rho_ms)
        self.segment_ms = int(segment_ms)
        self.window_s = window_s
        self.fallback = fallback or ThresholdPolicy(logger=self._logger)
        self.monitor = monitor
        self.fallback_decisions = 0
        self.predicted_decisions = 0
        self.regenerations = 0
        self._schedule = []
        self._times = []
        self._valid_until = None

    @property
    def retrain_signals(self):
        return self.monitor.signals if self.monitor is not None else 0

    def start(self, link_space, channel_params):
        super().start(link_space, channel_params)
        self.fallback.start(link_space, channel_params)
        self._valid_until = None
        self.regenerations = self.fallback_decisions = self.predicted_decisions = 0

    def _regenerate(self, t_ms):
        window_seed = SeedStreams(self.seed).child_seed("gan", 4, self.regenerations)
        start = t_ms
        # raw marks are denormalized per direction at use
        self._schedule = predict_schedule(self.model, start, self.rho_ms, UPLINK, self.link_space,
                                          window_seed, self.segment_ms, self.window_s)
        self._times = [event.t_ms for event in self._schedule]
        self._valid_until = start + self.rho_ms
        self.regenerations += 1
        scheduled = sum(event.alpha for event in self._schedule)
        self.log(f"Schedule for [{start}, {self._valid_until}) ms: {len(self._schedule)} events, {scheduled} scheduled")

    def choose(self, ue, direction, sinr_db, t_ms):
        if self._valid_until is None or t_ms >= self._valid_until:
            self._regenerate(t_ms)
        i = bisect.bisect_right(self._times, t_ms) - 1
        if i < 0 or not self._schedule[i].alpha:
            self.fallback_decisions += 1
            return self.fallback.choose(ue, direction, sinr_db, t_ms)
        self.predicted_decisions += 1
        event = self._schedule[i]
        return self.link_space.denormalize(event.gamma, event.m_norm, event.r_norm, direction)

    def observe(self, ue, direction, delivered, t_ms):
        if self.monitor is not None:
            self.monitor.observe(delivered, t_ms)

    def finish(self, t_ms):
        self.log(f"SmartCon run finished: {self.predicted_decisions} predicted, {self.fallback_decisions} fallback, "
                 f"{self.regenerations} schedules, {self.retrain_signals} retrain signals")
