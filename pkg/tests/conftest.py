from pathlib import Path
import os
import sys

import pytest


os.environ.setdefault("DEBUG", "true")
os.environ.setdefault("SCAN_WORKERS", "2")
os.environ.setdefault("RESULT_CACHE_SIZE", "16")

PROJECT_ROOT = Path(__file__).resolve().parents[1]

if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from app.routers.simulation import clear_result_cache
from app.schemas.setup import ExperimentSetup
from app.utils.scenario import parse_config


@pytest.fixture(autouse=True)
def clear_cache() -> None:
    clear_result_cache()
    yield
    clear_result_cache()


@pytest.fixture
def default_setup() -> ExperimentSetup:
    return parse_config("")
