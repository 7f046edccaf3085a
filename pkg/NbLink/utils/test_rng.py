# test_rng.py
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.utils.rng import SUBSTREAMS, SeedStreams


def test_same_seed_same_stream():
    a = SeedStreams(42).generator("traffic").random(5)
    b = SeedStreams(42).generator("traffic").random(5)
    assert np.array_equal(a, b)


def test_streams_are_independent():
    streams = SeedStreams(42)
    channel = streams.generator("channel").random(5)
    traffic = streams.generator("traffic").random(5)
    assert not np.array_equal(channel, traffic)
    # children of one stream differ from each other and from the parent
    assert not np.array_equal(streams.generator("mab", 0).random(5), streams.generator("mab", 1).random(5))
    assert not np.array_equal(streams.generator("mab").random(5), streams.generator("mab", 0).random(5))


def test_child_seed():
    seed = SeedStreams(7).child_seed("gan", 3, 1)
    assert isinstance(seed, int) and 0 <= seed < 2 ** 64
    assert seed == SeedStreams(7).child_seed("gan", 3, 1)
    assert seed != SeedStreams(8).child_seed("gan", 3, 1)


def test_unknown_substream():
    assert SUBSTREAMS == ("channel", "traffic", "mab", "gan")
    try:
        SeedStreams(0).generator("weather")
        assert False, "unknown substream accepted"
    except KeyError:
        pass


def test_seed_wraps_to_64_bits():
    assert SeedStreams(-1).seed == 2 ** 64 - 1
    assert SeedStreams(2 ** 64 + 5).seed == 5


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
