# log_service.py - Logging utilities
import logging as py_logging  # Rename the import to avoid confusion
import os
from datetime import datetime

# Run-wide defaults, set once by the CLI before components are built
_defaults = {"log_dir": None, "level": py_logging.INFO}


def configure_defaults(log_dir=None, level="INFO"):
    """Set the log directory and level used by loggers created afterwards"""
    if isinstance(level, str):
        level = py_logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = py_logging.INFO
    _defaults["log_dir"] = log_dir
    _defaults["level"] = level


def setup_logger(name, log_dir=None, level=None):
    """
    Set up a logger with console and optional file handlers

    Args:
        name: Logger name (typically module name)
        log_dir: Directory to store log files (None = console only)
        level: Logging level

    Returns:
        Configured logger
    """
    if log_dir is None:
        log_dir = _defaults["log_dir"]
    if level is None:
        level = _defaults["level"]

    logger = py_logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    formatter = py_logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    # Console handler goes to stderr so stdout stays clean for command output
    console_handler = py_logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_dir:
        if not os.path.exists(log_dir):
            os.makedirs(log_dir)
        log_file = os.path.join(log_dir, f"{name}_{datetime.now().strftime('%Y%m%d')}.log")
        file_handler = py_logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


class LoggingService:
    """Service for standardized logging across the application"""

    def __init__(self, module_name, log_dir=None, level=None):
        """Initialize logging service for a module"""
        self.logger = setup_logger(module_name, log_dir, level)

    def info(self, message):
        """Log info message"""
        self.logger.info(message)

    def warning(self, message):
        """Log warning message"""
        self.logger.warning(message)

    def error(self, message):
        """Log error message"""
        self.logger.error(message)

    def debug(self, message):
        """Log debug message"""
        self.logger.debug(message)

    def critical(self, message):
        """Log critical message"""
        self.logger.critical(message)

    def close(self):
        """Close all handlers to release file locks"""
        for handler in self.logger.handlers[:]:
            handler.close()
            self.logger.removeHandler(handler)
