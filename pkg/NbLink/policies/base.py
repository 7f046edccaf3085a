# base.py - Link-adaptation policy interface used by the simulator
from NbLink.utils.log_service import LoggingService


class Policy:
    """
    Chooses an M-R-P configuration for every transmission

    `scheduler` names the UE selection the simulator applies for this
    policy: "pf" (proportional fair) or "fifo".
    """

    name = "policy"
    scheduler = "pf"

    def __init__(self, logger=None):
        self._logger = logger or LoggingService(__name__)
        self.log = self._logger.info
        self.link_space = None
        self.channel_params = None

    def start(self, link_space, channel_params):
        """Called once before the first subframe of a run"""
        self.link_space = link_space
        self.channel_params = channel_params

    def choose(self, ue, direction, sinr_db, t_ms):
        raise NotImplementedError

    def observe(self, ue, direction, delivered, t_ms):
        """Outcome of the transmission chosen for `ue` at `t_ms`"""

    def current_window(self, ue, direction):
        """Observation window the last choice for (ue, direction) belongs to, if any"""
        return None

    def finish(self, t_ms):
        """Called once after the last subframe"""
