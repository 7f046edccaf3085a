# link_model.py - NB-IoT configuration space, normalization and channel/transport model
"""
Configuration space (MCS, repetitions, PRBs) of NB-IoT link adaptation,
the [0, 1] normalizations used by the dataset and the GAN, and the
parametric channel model standing in for the PHY: a logistic
success curve around a per-MCS SINR threshold, ideal repetition
combining gain and a monotone transport-block table.
"""
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.special import expit

from NbLink.utils.errors import DomainError

MCS_MIN = 0
MCS_MAX = 12
MCS_LEVELS = tuple(range(MCS_MIN, MCS_MAX + 1))

UPLINK = "uplink"
DOWNLINK = "downlink"

# Single-letter form used in dataset records
DIRECTION_CODES = {UPLINK: "U", DOWNLINK: "D"}
CODE_DIRECTIONS = {code: name for name, code in DIRECTION_CODES.items()}


def default_tbs_bits():
    """Bits per PRB per subframe for MCS 0..12: 16·(m+1)"""
    return tuple(16 * (m + 1) for m in MCS_LEVELS)


@dataclass(frozen=True)
class LinkConfig:
    """One M-R-P arm: MCS level, repetition count, PRB count"""
    mcs: int
    repetitions: int
    prb_count: int

    def __str__(self):
        return f"M{self.mcs}-R{self.repetitions}-P{self.prb_count}"


@dataclass(frozen=True)
class RepetitionSet:
    direction: str
    values: tuple

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise DomainError(f"Repetition values must be strictly increasing: {self.values}")
        if any(v < 1 or v & (v - 1) for v in self.values):
            raise DomainError(f"Repetition values must be powers of two: {self.values}")

    def __len__(self):
        return len(self.values)

    def __contains__(self, rep):
        return rep in self.values

    def index(self, rep):
        try:
            return self.values.index(rep)
        except ValueError:
            raise DomainError(f"Repetition {rep} not in {self.direction} set {self.values}") from None


UPLINK_REPETITIONS = RepetitionSet(UPLINK, (1, 2, 4, 8, 16, 32, 64, 128))
DOWNLINK_REPETITIONS = RepetitionSet(DOWNLINK, (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048))


def repetition_set(direction):
    if direction in (UPLINK, "U"):
        return UPLINK_REPETITIONS
    if direction in (DOWNLINK, "D"):
        return DOWNLINK_REPETITIONS
    raise DomainError(f"Unknown direction: {direction}")


@dataclass(frozen=True)
class ChannelModelParams:
    t0_db: float = -2.0
    slope_db_per_mcs: float = 1.8
    steepness: float = 1.0
    tbs_bits: tuple = field(default_factory=default_tbs_bits)

    def __post_init__(self):
        if len(self.tbs_bits) != len(MCS_LEVELS):
            raise DomainError(f"tbs_bits needs {len(MCS_LEVELS)} entries, got {len(self.tbs_bits)}")
        if any(b <= a for a, b in zip(self.tbs_bits, self.tbs_bits[1:])):
            raise DomainError("tbs_bits must be strictly increasing in MCS")
        if self.tbs_bits[0] <= 0:
            raise DomainError("tbs_bits entries must be positive")
        if not self.steepness > 0:
            raise DomainError(f"steepness must be > 0, got {self.steepness}")


def _check_mcs(mcs):
    if not MCS_MIN <= mcs <= MCS_MAX or int(mcs) != mcs:
        raise DomainError(f"MCS level {mcs} outside {MCS_MIN}..{MCS_MAX}")


# Normalization

def normalize_mcs(mcs):
    _check_mcs(mcs)
    return (mcs - MCS_MIN) / (MCS_MAX - MCS_MIN)


def denormalize_mcs(value):
    """Nearest legal MCS level for a normalized value"""
    level = math.floor(value * (MCS_MAX - MCS_MIN) + 0.5) + MCS_MIN
    return int(min(max(level, MCS_MIN), MCS_MAX))


def normalize_repetition(rep, rep_set):
    return rep_set.index(rep) / (len(rep_set) - 1)


def denormalize_repetition(value, rep_set):
    """Nearest repetition by set index; exact halves go to the lower index"""
    idx = math.ceil(value * (len(rep_set) - 1) - 0.5)
    idx = min(max(idx, 0), len(rep_set) - 1)
    return rep_set.values[idx]


def normalize_prb(prb_count, max_prb):
    if not 1 <= prb_count <= max_prb:
        raise DomainError(f"PRB count {prb_count} outside 1..{max_prb}")
    if max_prb == 1:
        return 0.0
    return (prb_count - 1) / (max_prb - 1)


def denormalize_prb(value, max_prb):
    count = math.floor(1 + value * (max_prb - 1) + 0.5)
    return int(min(max(count, 1), max_prb))


# Channel and transport model

def effective_sinr(sinr_db, repetitions):
    """SINR after ideal combining of all repetitions"""
    if repetitions < 1:
        raise DomainError(f"repetitions must be >= 1, got {repetitions}")
    return sinr_db + 10.0 * math.log10(repetitions)


def mcs_threshold(mcs, params):
    return params.t0_db + params.slope_db_per_mcs * mcs


def success_probability(sinr_eff_db, mcs, params):
    _check_mcs(mcs)
    return float(expit(params.steepness * (sinr_eff_db - mcs_threshold(mcs, params))))


def subframes_needed(packet_bits, cfg, params):
    if packet_bits <= 0:
        raise DomainError(f"packet_bits must be > 0, got {packet_bits}")
    capacity = params.tbs_bits[cfg.mcs] * cfg.prb_count
    return -(-packet_bits // capacity) * cfg.repetitions


def best_feasible_mcs(sinr_db, params):
    """Highest MCS whose threshold does not exceed the SINR; 0 when none does"""
    thresholds = params.t0_db + params.slope_db_per_mcs * np.arange(MCS_MIN, MCS_MAX + 1)
    feasible = np.nonzero(thresholds <= sinr_db)[0]
    return int(feasible[-1]) if feasible.size else MCS_MIN


class LinkSpace:
    """
    The legal configuration space for one eNB: every MCS level, the
    repetition set of each direction and PRB counts 1..max_prb.
    """

    def __init__(self, max_prb=6):
        if max_prb < 1:
            raise DomainError(f"max_prb must be >= 1, got {max_prb}")
        self.max_prb = int(max_prb)
        self._arms = {}

    def repetitions(self, direction):
        return repetition_set(direction)

    def arms(self, direction):
        """All legal LinkConfigs for a direction, in (mcs, rep, prb) order"""
        rep_set = repetition_set(direction)
        if rep_set.direction not in self._arms:
            self._arms[rep_set.direction] = tuple(
                LinkConfig(m, r, p)
                for m, r, p in product(MCS_LEVELS, rep_set.values, range(1, self.max_prb + 1)))
        return self._arms[rep_set.direction]

    def arm_count(self, direction):
        return len(MCS_LEVELS) * len(repetition_set(direction)) * self.max_prb

    def is_legal(self, cfg, direction):
        return (MCS_MIN <= cfg.mcs <= MCS_MAX
                and cfg.repetitions in repetition_set(direction)
                and 1 <= cfg.prb_count <= self.max_prb)

    def validate(self, cfg, direction):
        if not self.is_legal(cfg, direction):
            raise DomainError(f"Illegal {direction} configuration {cfg} (max_prb={self.max_prb})")
        return cfg

    def normalize(self, cfg, direction):
        """(γ, m, r) for a legal configuration"""
        self.validate(cfg, direction)
        return (normalize_prb(cfg.prb_count, self.max_prb),
                normalize_mcs(cfg.mcs),
                normalize_repetition(cfg.repetitions, repetition_set(direction)))

    def denormalize(self, gamma, m_norm, r_norm, direction):
        return LinkConfig(denormalize_mcs(m_norm),
                          denormalize_repetition(r_norm, repetition_set(direction)),
                          denormalize_prb(gamma, self.max_prb))
