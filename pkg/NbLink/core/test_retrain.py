# test_retrain.py
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.core.retrain import RetrainMonitor, should_retrain
from NbLink.utils.errors import DomainError


def test_should_retrain_examples():
    x = [0.1, 0.2, 0.3, 0.4]
    assert should_retrain(x, x) is False
    assert should_retrain(x, [-v for v in x]) is True
    # r = 0.9827 for this pair
    assert should_retrain(x, [0.1, 0.2, 0.3, 0.5]) is False
    assert should_retrain(x, [0.1, 0.2, 0.3, 0.5], threshold=0.99) is True


def test_should_retrain_degenerate():
    assert should_retrain([0.2, 0.2, 0.2], [0.1, 0.5, 0.3]) is False
    assert should_retrain([0.1, 0.5, 0.3], [0.0, 0.0, 0.0]) is False
    for recent, training in (([0.1], [0.2]), ([0.1, 0.2], [0.1, 0.2, 0.3])):
        try:
            should_retrain(recent, training)
            assert False, "invalid series accepted"
        except DomainError:
            pass


def _feed(monitor, plrs, per_bucket=20):
    for bucket, plr in enumerate(plrs):
        lost = int(round(plr * per_bucket))
        for k in range(per_bucket):
            monitor.observe(k >= lost, bucket * 1000 + k)


def test_monitor_signals_on_anticorrelated_plr():
    training = np.tile([0.1, 0.2, 0.3, 0.4, 0.5], 20)
    monitor = RetrainMonitor(training, np.random.default_rng(0), threshold=0.3, window_ms=5000)
    # recent PLR runs against the training pattern
    _feed(monitor, np.tile([0.5, 0.4, 0.3, 0.2, 0.1], 4))
    assert monitor.checks > 0 and monitor.signals > 0


def test_monitor_quiet_on_matching_plr():
    training = np.full(50, 0.25)
    monitor = RetrainMonitor(training, np.random.default_rng(0), window_ms=5000)
    _feed(monitor, [0.1, 0.3, 0.2, 0.4, 0.1, 0.3])
    # a constant training sample gives no evidence of drift
    assert monitor.signals == 0


def test_recent_plr_buckets():
    monitor = RetrainMonitor([0.1, 0.2], np.random.default_rng(0), window_ms=3000)
    _feed(monitor, [0.0, 0.5, 1.0, 0.25], per_bucket=4)
    assert monitor.recent_plr(4) == [0.5, 1.0, 0.25]
    assert monitor.recent_plr(1) == [0.0]


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
