import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from services.pocset_service import Halfspace, HalfspaceSystem
from utils.config import reset_config
from utils.formats import load_input

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

settings.register_profile(
    "fast",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    monkeypatch.delenv("CUBIST_MAX_WALLS", raising=False)
    monkeypatch.delenv("CUBIST_CONFIG", raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def corpus():
    """Load a corpus input by file name"""

    def load(name: str):
        return load_input(CORPUS / name)

    return load


@pytest.fixture
def square() -> HalfspaceSystem:
    return HalfspaceSystem(2)


@pytest.fixture
def path2() -> HalfspaceSystem:
    # {n >= 2} inside {n >= 1}
    return HalfspaceSystem.from_generators(2, [(Halfspace(1), Halfspace(0))])
