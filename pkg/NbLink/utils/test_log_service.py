# test_log_service.py
import os
import sys
# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels

# Add the project's root directory to sys.path
sys.path.append(project_root)

import shutil
import tempfile
import logging as py_logging
from NbLink.utils.log_service import configure_defaults, setup_logger, LoggingService


def test_logging_to_directory():
    temp_dir = tempfile.mkdtemp()
    try:
        logger = setup_logger("nblink_test_logger", log_dir=temp_dir)
        logger.info("Test info message")
        logger.warning("Test warning message")

        log_files = os.listdir(temp_dir)
        assert len(log_files) == 1 and log_files[0].startswith("nblink_test_logger_")
        for handler in logger.handlers:
            handler.flush()
        with open(os.path.join(temp_dir, log_files[0]), 'r') as f:
            lines = f.read().splitlines()
        assert " - nblink_test_logger - INFO - Test info message" in lines[0]
        assert " - WARNING - " in lines[1]

        # A second setup reuses the handlers already attached
        again = setup_logger("nblink_test_logger", log_dir=temp_dir)
        assert again is logger and len(again.handlers) == 2

        service = LoggingService("nblink_test_service", log_dir=temp_dir)
        service.info("Service info message")
        service.error("Service error message")
        assert len(os.listdir(temp_dir)) == 2

        # Close all handlers before deleting files
        for handler in logger.handlers[:]:
            handler.close()
            logger.removeHandler(handler)
        service.close()
        assert service.logger.handlers == []
    finally:
        shutil.rmtree(temp_dir, ignore_errors=True)


def test_configure_defaults():
    temp_dir = tempfile.mkdtemp()
    try:
        configure_defaults(temp_dir, "warning")
        service = LoggingService("nblink_test_defaults")
        assert service.logger.level == py_logging.WARNING
        assert len(os.listdir(temp_dir)) == 1
        service.close()

        configure_defaults(None, "no-such-level")
        console_only = LoggingService("nblink_test_console")
        assert console_only.logger.level == py_logging.INFO
        assert len(console_only.logger.handlers) == 1
        console_only.close()
    finally:
        configure_defaults(None, "INFO")
        shutil.rmtree(temp_dir, ignore_errors=True)


if __name__ == "__main__":
    test_logging_to_directory()
    test_configure_defaults()
    print("Logging tests completed successfully!")
