# tests/conftest.py
import os, sys
# Add the repository root (two levels above /tests) to sys.path so 'perfdom' is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..')))

from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance checks (deselect with -m 'not slow')")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES
