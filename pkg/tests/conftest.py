"""Shared test configuration."""
import os
from pathlib import Path

import pytest

# Pin settings so a developer's shell or .env never changes test defaults
os.environ["SETSIM_LOG_LEVEL"] = "WARNING"
os.environ["SETSIM_TOLERANCE"] = "1e-4"
os.environ["SETSIM_MAX_DOUBLINGS"] = "6"
os.environ["SETSIM_BASE_NODES"] = "64"
os.environ["SETSIM_NARROWNESS_FACTOR"] = "20"
os.environ["SETSIM_ORACLE_REFINEMENT"] = "4"

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "data" / "scenarios"


@pytest.fixture
def scenario_path():
    """Path of a bundled scenario by name."""
    def _path(name: str) -> Path:
        return SCENARIO_DIR / f"{name}.scenario"
    return _path


@pytest.fixture(autouse=True)
def fresh_settings():
    from setsim.config import get_settings
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
