# retrain.py - Correlation-based retraining trigger
import numpy as np
from scipy.stats import pearsonr

from NbLink.utils.errors import DomainError
from NbLink.utils.log_service import LoggingService


def should_retrain(recent_plr, training_plr, threshold=0.3):
    """
    True when the Pearson correlation between recent window PLRs and a
    training PLR sample falls below `threshold`. Series without variance
    give no evidence of drift and return False.
    """
    x = np.asarray(recent_plr, dtype=float)
    y = np.asarray(training_plr, dtype=float)
    if x.size != y.size:
        raise DomainError(f"Series lengths differ: {x.size} vs {y.size}")
    if x.size < 2:
        raise DomainError("Correlation needs at least two points per series")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return False
    r, _ = pearsonr(x, y)
    return bool(r < threshold)


class RetrainMonitor:
    """
    Buckets transmission outcomes into per-second PLRs and, on a loss,
    correlates the last `window_ms` of buckets against a random contiguous
    stretch of the training PLR column. Checks run at most once per bucket.
    """

    def __init__(self, training_plr, rng, threshold=0.3, window_ms=60_000, bucket_ms=1000,
                 record_threshold=100_000, logger=None):
        self.training_plr = np.asarray(training_plr, dtype=float)
        self.rng = rng
        self.threshold = threshold
        self.window_ms = window_ms
        self.bucket_ms = bucket_ms
        self.record_threshold = record_threshold
        self.signals = 0
        self.checks = 0
        self._attempts = {}
        self._lost = {}
        self._last_check = None

        self._logger = logger or LoggingService(__name__)
        self.log = self._logger.info

    def observe(self, delivered, t_ms):
        bucket = int(t_ms // self.bucket_ms)
        self._attempts[bucket] = self._attempts.get(bucket, 0) + 1
        if not delivered:
            self._lost[bucket] = self._lost.get(bucket, 0) + 1
            if self._last_check is None or bucket > self._last_check:
                self._last_check = bucket
                self.check(bucket)

    def recent_plr(self, current_bucket):
        """PLR of each finished bucket inside the window, oldest first"""
        first = current_bucket - self.window_ms // self.bucket_ms
        return [self._lost.get(b, 0) / self._attempts[b]
                for b in range(max(first, 0), current_bucket) if b in self._attempts]

    def check(self, current_bucket):
        recent = self.recent_plr(current_bucket)
        n = min(len(recent), self.training_plr.size)
        if n < 2:
            return False
        start = int(self.rng.integers(0, self.training_plr.size - n + 1))
        sample = self.training_plr[start:start + n]
        self.checks += 1
        if should_retrain(recent[-n:], sample, self.threshold):
            self.signals += 1
            self.log(f"Retrain signal at {current_bucket * self.bucket_ms} ms: PLR correlation below "
                     f"{self.threshold} over {n} buckets (retrain once {self.record_threshold} new records exist)")
            return True
        return False
