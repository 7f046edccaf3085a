# conftest.py - test isolation for run-wide logging defaults
import pytest

from NbLink.utils import log_service


@pytest.fixture(autouse=True)
def _restore_log_defaults():
    """Restore log_service defaults so one test's CLI run doesn't leak into the next"""
    saved = dict(log_service._defaults)
    yield
    log_service._defaults.clear()
    log_service._defaults.update(saved)
