"""Shared fixtures and the hypothesis settings profiles."""

import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

EXAMPLES_DIR = Path(__file__).resolve().parent.parent / "resources" / "examples"


@pytest.fixture
def examples_dir() -> Path:
    return EXAMPLES_DIR
