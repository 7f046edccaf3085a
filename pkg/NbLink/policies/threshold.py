# threshold.py - Threshold-based link adaptation baseline
import math

from NbLink.core.link_model import LinkConfig, best_feasible_mcs, mcs_threshold, repetition_set
from NbLink.policies.base import Policy


def threshold_config(sinr_db, direction, params, margin_db=3.0, step_db=3.0):
    """
    Highest MCS whose threshold fits under the SINR, one PRB, and one
    repetition doubling for every `step_db` the SINR sits below the MCS 0
    threshold plus `margin_db` (capped at the largest repetition).
    """
    mcs = best_feasible_mcs(sinr_db, params)
    rep_values = repetition_set(direction).values
    shortfall = mcs_threshold(0, params) + margin_db - sinr_db
    repetitions = 1
    if shortfall > 0:
        doublings = math.ceil(shortfall / step_db)
        repetitions = min(2 ** doublings, rep_values[-1])
    return LinkConfig(mcs, repetitions, 1)


class ThresholdPolicy(Policy):
    name = "threshold"
    scheduler = "pf"

    def __init__(self, margin_db=3.0, step_db=3.0, logger=None):
        super().__init__(logger)
        self.margin_db = margin_db
        self.step_db = step_db

    def choose(self, ue, direction, sinr_db, t_ms):
        return threshold_config(sinr_db, direction, self.channel_params, self.margin_db, self.step_db)
