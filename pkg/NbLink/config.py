import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from NbLink.core.link_model import ChannelModelParams, LinkSpace, default_tbs_bits
from NbLink.core.mab_engine import MabParams
from NbLink.core.metrics import METRICS_COLUMNS
from NbLink.core.simulator import SimConfig
from NbLink.gan.trainer import GanSettings
from NbLink.utils.errors import ConfigError, DomainError
from NbLink.utils.regex import RegexPatterns


class NbLinkConfig:
    DEFAULT_CONFIG_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.txt")

    # File formats
    DATASET_HEADER = "t_ms,dir,alpha,prb_norm,mcs_norm,rep_norm,sinr_db,plr"
    CHECKPOINT_VERSION = 1
    CHECKPOINT_TAG = f"SMARTCON-CKPT v{CHECKPOINT_VERSION}"
    METRICS_COLUMNS = METRICS_COLUMNS
    SIGNIFICANT_DIGITS = 10
    TEMP_SUFFIX = '.tmp'

    # Sweep workbook styling
    EXCEL_STYLES = {
        "best": "00CC00",  # Green
        "worst": "FF4747",  # Red
        "header": "DDD9C4"  # Light gray
    }


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _at_least_one(v):
    return v >= 1


def _unit(v):
    return 0.0 <= v <= 1.0


# key -> (check, description); every RunConfig field must appear here
RANGES = {
    "t0_db": (lambda v: True, "any real"),
    "slope_db_per_mcs": (_positive, "> 0"),
    "steepness": (_positive, "> 0"),
    "tbs_bits": (lambda v: len(v) == 13 and all(b > 0 for b in v), "13 positive integers"),
    "max_prb": (_at_least_one, ">= 1"),
    "mab_c": (_at_least_one, ">= 1"),
    "mab_d": (_positive, "> 0"),
    "delta_db": (_positive, "> 0"),
    "t_d_ms": (_at_least_one, ">= 1"),
    "plr_floor": (lambda v: 0 < v <= 1, "in (0, 1]"),
    "table_capacity": (_at_least_one, ">= 1"),
    "idle_sample_every": (_at_least_one, ">= 1"),
    "hidden": (_at_least_one, ">= 1"),
    "mu": (_non_negative, ">= 0"),
    "beta": (_positive, "> 0"),
    "learning_rate": (_positive, "> 0"),
    "grad_clip": (_positive, "> 0"),
    "sequence_window_ms": (_at_least_one, ">= 1"),
    "ogata_window_s": (_positive, "> 0"),
    "n_ues": (_at_least_one, ">= 1"),
    "duration_ms": (_at_least_one, ">= 1"),
    "sinr_low_db": (lambda v: True, "any real"),
    "sinr_high_db": (lambda v: True, "any real"),
    "sinr_step_db": (_non_negative, ">= 0"),
    "initial_sinr_db": (lambda v: True, "any real or none"),
    "packet_bits": (_at_least_one, ">= 1"),
    "arrival_rate_per_ue": (_non_negative, ">= 0"),
    "ul_fraction": (_unit, "in [0, 1]"),
    "tcp_fraction": (_unit, "in [0, 1]"),
    "pf_horizon": (_at_least_one, ">= 1"),
    "threshold_margin_db": (_non_negative, ">= 0"),
    "rho_ms": (_at_least_one, ">= 1"),
    "correlation_threshold": (lambda v: -1.0 <= v <= 1.0, "in [-1, 1]"),
    "retrain_record_threshold": (_at_least_one, ">= 1"),
    "log_dir": (lambda v: True, "a directory or none"),
    "log_level": (lambda v: v.upper() in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"), "a logging level"),
}


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of the pipeline, read from one flat key = value file"""
    # channel model
    t0_db: float = -2.0
    slope_db_per_mcs: float = 1.8
    steepness: float = 1.0
    tbs_bits: tuple = field(default_factory=default_tbs_bits)
    max_prb: int = 6
    # bandit
    mab_c: int = 5
    mab_d: float = 0.1
    delta_db: float = 1.0
    t_d_ms: int = 100
    plr_floor: float = 1e-3
    table_capacity: int = 100_000
    idle_sample_every: int = 10
    # adversarial model
    hidden: int = 32
    mu: float = 1.0
    beta: float = 2.0
    learning_rate: float = 1e-3
    grad_clip: float = 5.0
    sequence_window_ms: int = 10_000
    ogata_window_s: float = 1.0
    # simulation
    n_ues: int = 50
    duration_ms: int = 200_000
    sinr_low_db: float = 5.0
    sinr_high_db: float = 25.0
    sinr_step_db: float = 0.5
    initial_sinr_db: Optional[float] = None
    packet_bits: int = 800
    arrival_rate_per_ue: float = 2.0
    ul_fraction: float = 0.5
    tcp_fraction: float = 0.2
    pf_horizon: int = 100
    threshold_margin_db: float = 3.0
    # retraining
    rho_ms: int = 60_000
    correlation_threshold: float = 0.3
    retrain_record_threshold: int = 100_000
    # logging
    log_dir: Optional[str] = None
    log_level: str = "INFO"

    def __post_init__(self):
        self.validate()

    def validate(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                if f.name not in ("initial_sinr_db", "log_dir"):
                    raise ConfigError(f"{f.name}: a value is required")
                continue
            check, description = RANGES[f.name]
            if not check(value):
                raise ConfigError(f"{f.name}: {value!r} out of range, expected {description}")
        if not self.sinr_low_db < self.sinr_high_db:
            raise ConfigError(f"sinr_high_db: {self.sinr_high_db} must exceed sinr_low_db {self.sinr_low_db}")
        try:
            self.channel_params()
        except DomainError as e:
            raise ConfigError(f"tbs_bits: {e}") from None
        return self

    # Parsing

    @classmethod
    def from_text(cls, text, source="<config>"):
        regex = RegexPatterns()
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for number, line in enumerate(text.splitlines(), start=1):
            if regex.contains('comment', line):
                continue
            match = regex.match('config_line', line)
            if match is None:
                raise ConfigError(f"{source}:{number}: expected 'key = value', got {line.strip()!r}")
            key, raw = match.group(1), match.group(2)
            if key not in types:
                raise ConfigError(f"{key}: unknown key ({source}:{number})")
            if key in values:
                raise ConfigError(f"{key}: given twice ({source}:{number})")
            values[key] = _parse_value(key, types[key], raw, regex)
        return cls(**values)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e.strerror or e}") from None
        return cls.from_text(text, source=path)

    def to_text(self):
        lines = ["# NbLink run configuration"]
        for f in fields(self):
            lines.append(f"{f.name} = {_format_value(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    def with_overrides(self, **overrides):
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown key")
        return replace(self, **overrides)

    # Component settings

    def channel_params(self):
        return ChannelModelParams(self.t0_db, self.slope_db_per_mcs, self.steepness, tuple(self.tbs_bits))

    def link_space(self):
        return LinkSpace(self.max_prb)

    def mab_params(self):
        return MabParams(c=self.mab_c, d=self.mab_d, delta_db=self.delta_db, t_d_ms=self.t_d_ms,
                         plr_floor=self.plr_floor, table_capacity=self.table_capacity)

    def sim_config(self, **overrides):
        values = dict(n_ues=self.n_ues, duration_ms=self.duration_ms,
                      sinr_range_db=(self.sinr_low_db, self.sinr_high_db), packet_bits=self.packet_bits,
                      arrival_rate_per_ue=self.arrival_rate_per_ue, ul_fraction=self.ul_fraction,
                      tcp_fraction=self.tcp_fraction, sinr_step_db=self.sinr_step_db,
                      initial_sinr_db=self.initial_sinr_db, pf_horizon=self.pf_horizon)
        values.update(overrides)
        return SimConfig(**values)

    def gan_settings(self, show_progress=True):
        return GanSettings(hidden=self.hidden, mu=self.mu, beta=self.beta, learning_rate=self.learning_rate,
                           sequence_window_ms=self.sequence_window_ms, ogata_window_s=self.ogata_window_s,
                           grad_clip=self.grad_clip, max_prb=self.max_prb, show_progress=show_progress)


def _parse_value(key, kind, raw, regex):
    text = raw.strip()
    if text.lower() == "none" and key in ("initial_sinr_db", "log_dir"):
        return None
    try:
        if key == "tbs_bits":
            if not regex.contains('int_list', text):
                raise ValueError(text)
            return tuple(int(v) for v in text.split(","))
        if kind in (int, "int"):
            return int(text)
        if kind in (float, "float", Optional[float], "Optional[float]"):
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)
