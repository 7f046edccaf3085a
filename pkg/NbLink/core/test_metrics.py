# test_metrics.py
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.core.metrics import METRICS_COLUMNS, MetricsReport, delay_cdf, mape, mape_avg, selection_medians
from NbLink.utils.errors import DomainError


def test_mape_hand_example():
    value, excluded = mape([1, 2], [1.1, 1.8])
    assert abs(value - 10.0) < 1e-9 and excluded == 0
    assert abs(mape_avg(([1, 2], [1.1, 1.8])) - 10.0) < 1e-9
    assert mape([3, 4, 5], [3, 4, 5]) == (0.0, 0)


def test_mape_zero_actuals():
    value, excluded = mape([0, 2, 0], [1, 1, 1])
    assert value == 50.0 and excluded == 2
    assert mape([0, 0], [1, 1]) == (None, 2)
    # all-zero quantities drop out of the average; nothing left -> absent
    assert mape_avg(([0, 0], [1, 1]), ([2], [1])) == 50.0
    assert mape_avg(([0, 0], [1, 1])) is None
    try:
        mape([1, 2], [1])
        assert False, "length mismatch accepted"
    except DomainError:
        pass


def test_mape_average_of_quantities():
    assert abs(mape_avg(([1, 2], [1.1, 1.8]), ([4], [5])) - 17.5) < 1e-9


def test_delay_cdf_quantiles():
    assert delay_cdf([1, 2, 3, 4]).quantile(0.5) == 2.5
    single = delay_cdf([7])
    assert all(single.quantile(q) == 7 for q in (0.0, 0.3, 1.0))
    try:
        delay_cdf([])
        assert False, "empty CDF accepted"
    except DomainError:
        pass
    try:
        single.quantile(1.5)
        assert False, "quantile 1.5 accepted"
    except DomainError:
        pass


def test_delay_cdf_monotone():
    cdf = delay_cdf(np.random.default_rng(2).exponential(20.0, size=500))
    points = cdf.points()
    assert all(a[0] <= b[0] and a[1] <= b[1] for a, b in zip(points, points[1:]))
    assert points[-1][1] == 1.0
    assert cdf.cdf(-1.0) == 0.0 and cdf.cdf(1e9) == 1.0


def _report(**overrides):
    values = dict(policy="static", n_ues=10, seed=3, throughput_bps=1234.5, avg_plr=0.25, avg_delay_ms=12.0,
                  delay_samples=[10, 12, 14], consumed_subframes=640)
    values.update(overrides)
    return MetricsReport(**values)


def test_csv_row():
    row = _report().csv_row()
    assert len(row) == len(METRICS_COLUMNS)
    assert row == ["static", "10", "3", "1234.5", "0.25", "12", "12", "13.8", "640", ""]
    assert _report(mape_avg=5.21).csv_row()[-1] == "5.21"
    # no delivered packet: quantiles fall back to 0
    assert _report(delay_samples=[]).csv_row()[6:8] == ["0", "0"]


def test_selection_medians():
    report = _report(selections=[(6.0, 2, 8, 1), (8.0, 4, 4, 1), (22.0, 12, 1, 1), (24.0, 11, 1, 2)])
    assert selection_medians(report, (5.0, 10.0)) == (3.0, 6.0)
    assert selection_medians(report, (20.0, 25.0)) == (11.5, 1.0)
    assert selection_medians(report, (10.0, 20.0)) == (None, None)
    exploited = [(6.0, 2, 8), (7.5, 3, 2), (21.0, 9, 1)]
    assert selection_medians(exploited, (5.0, 10.0)) == (2.5, 5.0)


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
