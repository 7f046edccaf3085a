# rng.py - Named random substreams derived from one 64-bit seed
import numpy as np

SUBSTREAMS = ("channel", "traffic", "mab", "gan")


class SeedStreams:
    """
    Hands out independent numpy Generators keyed by name.

    The same (seed, name) pair always yields the same stream, so a
    component can be swapped or re-run without shifting the draws of
    the others.
    """

    def __init__(self, seed):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF

    def sequence(self, name, *extra):
        if name not in SUBSTREAMS:
            raise KeyError(f"Unknown random substream: {name}")
        key = (SUBSTREAMS.index(name),) + tuple(int(e) for e in extra)
        return np.random.SeedSequence(self.seed, spawn_key=key)

    def generator(self, name, *extra):
        """Generator for a named substream; extra ints select a child (episode, run...)"""
        return np.random.default_rng(self.sequence(name, *extra))

    def child_seed(self, name, *extra):
        """A plain 64-bit integer seed for components that take an int"""
        return int(self.sequence(name, *extra).generate_state(1, dtype=np.uint64)[0])
