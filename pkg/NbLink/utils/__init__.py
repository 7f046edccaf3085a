"""Utility modules for the NbLink package."""
import os
import sys
# Calculate the project's root directory
def get_project_root():
    script_dir = os.path.dirname(os.path.abspath(__file__))
    return os.path.dirname(os.path.dirname(script_dir))  # Go up two levels

project_root = get_project_root()

# Add the project's root directory to sys.path
sys.path.append(project_root)

from NbLink.utils.errors import (
    NbLinkError, DomainError, NumericError, ConfigError, DatasetError, CheckpointError, SimulationError)
from NbLink.utils.regex import RegexPatterns
from NbLink.utils.log_service import setup_logger, configure_defaults, LoggingService
from NbLink.utils.rng import SeedStreams, SUBSTREAMS

__all__ = ['NbLinkError', 'DomainError', 'NumericError', 'ConfigError', 'DatasetError', 'CheckpointError',
           'SimulationError', 'RegexPatterns', 'setup_logger', 'configure_defaults', 'LoggingService',
           'SeedStreams', 'SUBSTREAMS']
