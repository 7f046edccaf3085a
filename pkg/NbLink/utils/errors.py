# errors.py - Exception hierarchy shared by every NbLink module


class NbLinkError(Exception):
    """Root of all errors raised on purpose by NbLink"""


class DomainError(NbLinkError, ValueError):
    """Argument outside the legal domain of an operation"""


class NumericError(NbLinkError, ArithmeticError):
    """Non-finite value where a finite one is required"""


class ConfigError(NbLinkError):
    """Malformed or out-of-range configuration; message names the key"""


class DatasetError(NbLinkError):
    """Dataset file unreadable or holding an invalid record"""


class CheckpointError(NbLinkError):
    """Checkpoint file with a wrong version, truncated body or mismatched dimensions"""


class SimulationError(NbLinkError):
    """Simulation could not continue; the running episode is discarded"""
