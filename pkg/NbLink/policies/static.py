# static.py - FIFO baseline with a fixed configuration
from NbLink.core.link_model import LinkConfig
from NbLink.policies.base import Policy

STATIC_CONFIG = LinkConfig(mcs=6, repetitions=1, prb_count=1)


class StaticPolicy(Policy):
    """Standard baseline: FIFO service, MCS 6, no repetition, one PRB"""

    name = "static"
    scheduler = "fifo"

    def __init__(self, config=STATIC_CONFIG, logger=None):
        super().__init__(logger)
        self.config = config

    def choose(self, ue, direction, sinr_db, t_ms):
        return self.config
