# metrics.py - Run metrics: throughput, PLR, delay CDF, MAPE
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from NbLink.utils.errors import DomainError

METRICS_COLUMNS = ("policy", "n_ues", "seed", "throughput_bps", "avg_plr", "avg_delay_ms",
                   "p50_delay_ms", "p95_delay_ms", "consumed_subframes", "mape_avg")


class DelayCdf:
    """Empirical CDF of packet delays with linear-interpolation quantiles"""

    def __init__(self, samples):
        values = np.sort(np.asarray(samples, dtype=float))
        if values.size == 0:
            raise DomainError("Delay CDF needs at least one sample")
        self.samples = values

    def __len__(self):
        return int(self.samples.size)

    def quantile(self, q):
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"Quantile {q} outside [0, 1]")
        return float(np.quantile(self.samples, q))

    def cdf(self, x):
        """Fraction of samples <= x"""
        return float(np.searchsorted(self.samples, x, side="right")) / self.samples.size

    def points(self):
        """(value, cumulative fraction) pairs for plotting"""
        n = self.samples.size
        return list(zip(self.samples.tolist(), (np.arange(1, n + 1) / n).tolist()))


def delay_cdf(samples):
    return DelayCdf(samples)


def mape(actual, predicted):
    """
    Mean absolute percentage error of one quantity.

    Returns (percentage or None, excluded) where zero actual values are
    excluded and counted; None when nothing is left to average.
    """
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise DomainError(f"Series lengths differ: {a.shape} vs {p.shape}")
    keep = a != 0
    excluded = int(a.size - np.count_nonzero(keep))
    if not keep.any():
        return None, excluded
    return float(100.0 * np.mean(np.abs(a[keep] - p[keep]) / np.abs(a[keep]))), excluded


def mape_avg(*series_pairs):
    """
    Average MAPE over several (actual, predicted) quantities, e.g. PRBs,
    MCS, repetitions and scheduling probability. A single pair gives the
    plain MAPE of that series. Quantities whose actual values are all zero
    are left out; None when none remain.
    """
    values = [v for v, _ in (mape(a, p) for a, p in series_pairs) if v is not None]
    if not values:
        return None
    return float(np.mean(values))


@dataclass
class MetricsReport:
    policy: str
    n_ues: int
    seed: int
    throughput_bps: float
    avg_plr: float
    avg_delay_ms: float
    delay_samples: list
    consumed_subframes: int
    mape_avg: Optional[float] = None
    packets_generated: int = 0
    packets_delivered: int = 0
    packets_lost: int = 0
    packets_queued: int = 0
    retrain_signals: int = 0
    fallback_decisions: int = 0
    # (sinr_db, mcs, repetitions, prb_count) per transmission
    selections: list = field(default_factory=list, repr=False)
    decision_time_us: float = field(default=0.0, compare=False)

    @property
    def delay_cdf(self):
        return DelayCdf(self.delay_samples) if self.delay_samples else None

    def delay_quantile(self, q):
        cdf = self.delay_cdf
        return cdf.quantile(q) if cdf is not None else 0.0

    def csv_row(self):
        mape_cell = "" if self.mape_avg is None else f"{self.mape_avg:.10g}"
        return [self.policy, str(self.n_ues), str(self.seed),
                f"{self.throughput_bps:.10g}", f"{self.avg_plr:.10g}", f"{self.avg_delay_ms:.10g}",
                f"{self.delay_quantile(0.5):.10g}", f"{self.delay_quantile(0.95):.10g}",
                str(self.consumed_subframes), mape_cell]


def selection_medians(selections, sinr_range):
    """
    Median MCS and median repetitions over transmissions with SINR in
    [low, high). Takes a MetricsReport or any list of (sinr, mcs, rep, ...)
    """
    low, high = sinr_range
    rows = getattr(selections, "selections", selections)
    picked = [(row[1], row[2]) for row in rows if low <= row[0] < high]
    if not picked:
        return None, None
    arr = np.asarray(picked, dtype=float)
    return float(np.median(arr[:, 0])), float(np.median(arr[:, 1]))
