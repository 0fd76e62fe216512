"""Tests for dataclass parameter validation."""

import logging

import pytest

from hierarchical_supervisor.params import CheckParams, LoggingParams, ProfileName, RandomProfile


def test_check_params_validate_bound_and_workers() -> None:
    with pytest.raises(ValueError, match="checks.bound must be >= 0"):
        CheckParams(bound=-1)
    with pytest.raises(ValueError, match="checks.workers must be > 0"):
        CheckParams(workers=0)
    with pytest.raises(ValueError, match="must be an integer"):
        CheckParams(bound=True)


def test_check_params_zero_bound_means_automatic() -> None:
    assert CheckParams().search_bound is None
    assert CheckParams(bound=5).search_bound == 5


def test_random_profile_limits() -> None:
    with pytest.raises(ValueError, match="random.max_states must be > 0"):
        RandomProfile(max_states=0)
    with pytest.raises(ValueError, match="random.max_events must be <= 26"):
        RandomProfile(max_events=27)
    with pytest.raises(ValueError, match="acyclic-small"):
        RandomProfile(name=ProfileName.ACYCLIC_SMALL, max_states=13)
    with pytest.raises(ValueError):
        RandomProfile(name="cyclic-large")


def test_random_profile_named_defaults() -> None:
    small = RandomProfile.named("acyclic-small")
    assert (small.max_states, small.max_events, small.max_depth) == (12, 3, 6)
    assert RandomProfile.named(ProfileName.UNCONSTRAINED) == RandomProfile()
    assert RandomProfile(name="moc-by-construction").name is ProfileName.MOC_BY_CONSTRUCTION


def test_logging_params_normalize_level() -> None:
    params = LoggingParams(level="info")
    assert params.level == "INFO"
    assert params.numeric_level == logging.INFO
    with pytest.raises(ValueError, match="logging.level must be one of"):
        LoggingParams(level="chatty")
