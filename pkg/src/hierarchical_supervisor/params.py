"""Typed parameter sets for checks and random instance generation.

Parameters are validated on construction so that the algorithms can assume
basic invariants (non-negative bounds, at least one worker, sane profile sizes).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _require_int(name: str, value: object) -> int:
    """Validate that a value is an int (bools are rejected)."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return value


def _require_non_negative(name: str, value: object) -> None:
    if _require_int(name, value) < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")


def _require_positive(name: str, value: object) -> None:
    if _require_int(name, value) <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")


class ProfileName(StrEnum):
    MOC_BY_CONSTRUCTION = "moc-by-construction"
    UNCONSTRAINED = "unconstrained"
    ACYCLIC_SMALL = "acyclic-small"


@dataclass(frozen=True)
class CheckParams:
    """Search settings for the OC/MOC/LOC checkers.

    `bound == 0` selects the automatic bound (twice the candidate pair
    automaton's state count).
    """

    bound: int = 0
    workers: int = 1
    use_sufficient_condition: bool = True

    def __post_init__(self) -> None:
        _require_non_negative("checks.bound", self.bound)
        _require_positive("checks.workers", self.workers)

    @property
    def search_bound(self) -> int | None:
        return self.bound or None


@dataclass(frozen=True)
class RandomProfile:
    """Size limits for `random_instance`."""

    name: ProfileName = ProfileName.UNCONSTRAINED
    max_states: int = 6
    max_events: int = 3
    max_depth: int = 6

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", ProfileName(self.name))
        _require_positive("random.max_states", self.max_states)
        _require_positive("random.max_events", self.max_events)
        _require_positive("random.max_depth", self.max_depth)
        if self.max_events > 26:
            raise ValueError(f"random.max_events must be <= 26, got {self.max_events}")
        if self.name is ProfileName.ACYCLIC_SMALL and self.max_states > 12:
            raise ValueError("random.max_states must be <= 12 for the acyclic-small profile")

    @classmethod
    def named(cls, name: str | ProfileName) -> RandomProfile:
        """Profile with the default limits for `name`."""
        profile = ProfileName(name)
        if profile is ProfileName.ACYCLIC_SMALL:
            return cls(name=profile, max_states=12, max_events=3, max_depth=6)
        return cls(name=profile)


@dataclass(frozen=True)
class LoggingParams:
    level: str = "WARNING"

    def __post_init__(self) -> None:
        level = self.level.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"logging.level must be one of {', '.join(LOG_LEVELS)}, got {self.level!r}")
        object.__setattr__(self, "level", level)

    @property
    def numeric_level(self) -> int:
        return logging.getLevelNamesMapping()[self.level]
