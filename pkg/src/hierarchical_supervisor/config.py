"""Load tool configuration and workflow manifests from TOML.

All sections are optional; missing keys fall back to the defaults shipped in
`resources/default_config.toml`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomllib

from hierarchical_supervisor.params import CheckParams, LoggingParams, RandomProfile


@dataclass(frozen=True)
class RandomConfig:
    seed: int = 0
    profile: RandomProfile = field(default_factory=RandomProfile)


@dataclass(frozen=True)
class ToolConfig:
    """Fully specified settings for a CLI or API run."""

    checks: CheckParams = field(default_factory=CheckParams)
    random: RandomConfig = field(default_factory=RandomConfig)
    logging: LoggingParams = field(default_factory=LoggingParams)


@dataclass(frozen=True)
class WorkflowEntry:
    name: str
    path: Path


@dataclass(frozen=True)
class WorkflowManifest:
    """Plants and specifications of a modular workflow run."""

    plants: tuple[WorkflowEntry, ...]
    specs: tuple[WorkflowEntry, ...]
    workers: int = 1


def _require_mapping(value: Any, *, key_path: str) -> dict[str, Any]:
    """Validate that a TOML value is a table (dict-like mapping).

    Args:
        value: Parsed TOML value.
        key_path: Dotted key path used for error messages.
    """
    if not isinstance(value, dict):
        raise ValueError(f"Expected table at '{key_path}', got {type(value).__name__}")
    return value


def _get_int(table: dict[str, Any], key: str, *, default: int | None = None, key_path: str) -> int:
    """Read an integer value from a TOML table (booleans are rejected)."""
    if key in table:
        value = table[key]
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        raise ValueError(f"Expected integer at '{key_path}.{key}', got {type(value).__name__}")
    if default is None:
        raise ValueError(f"Missing required key '{key_path}.{key}'")
    return default


def _get_bool(table: dict[str, Any], key: str, *, default: bool | None = None, key_path: str) -> bool:
    if key in table:
        value = table[key]
        if isinstance(value, bool):
            return value
        raise ValueError(f"Expected boolean at '{key_path}.{key}', got {type(value).__name__}")
    if default is None:
        raise ValueError(f"Missing required key '{key_path}.{key}'")
    return default


def _get_str(table: dict[str, Any], key: str, *, default: str | None = None, key_path: str) -> str:
    if key in table:
        value = table[key]
        if isinstance(value, str):
            return value
        raise ValueError(f"Expected string at '{key_path}.{key}', got {type(value).__name__}")
    if default is None:
        raise ValueError(f"Missing required key '{key_path}.{key}'")
    return default


def _read_toml(path: Path) -> dict[str, Any]:
    raw = tomllib.loads(path.read_text(encoding="utf-8"))
    return _require_mapping(raw, key_path="root")


def parse_config(root: dict[str, Any]) -> ToolConfig:
    """Convert a parsed TOML document into a typed `ToolConfig`."""
    checks_table = _require_mapping(root.get("checks", {}), key_path="checks")
    random_table = _require_mapping(root.get("random", {}), key_path="random")
    logging_table = _require_mapping(root.get("logging", {}), key_path="logging")

    checks = CheckParams(
        bound=_get_int(checks_table, "bound", default=0, key_path="checks"),
        workers=_get_int(checks_table, "workers", default=1, key_path="checks"),
        use_sufficient_condition=_get_bool(
            checks_table, "use_sufficient_condition", default=True, key_path="checks"
        ),
    )

    profile_name = _get_str(random_table, "profile", default="unconstrained", key_path="random")
    defaults = RandomProfile.named(profile_name)
    profile = RandomProfile(
        name=defaults.name,
        max_states=_get_int(random_table, "max_states", default=defaults.max_states, key_path="random"),
        max_events=_get_int(random_table, "max_events", default=defaults.max_events, key_path="random"),
        max_depth=_get_int(random_table, "max_depth", default=defaults.max_depth, key_path="random"),
    )

    return ToolConfig(
        checks=checks,
        random=RandomConfig(seed=_get_int(random_table, "seed", default=0, key_path="random"), profile=profile),
        logging=LoggingParams(level=_get_str(logging_table, "level", default="WARNING", key_path="logging")),
    )


def load_config(path: str | Path | None = None) -> ToolConfig:
    """Load a TOML file into a `ToolConfig`; `None` returns the defaults."""
    if path is None:
        return ToolConfig()
    return parse_config(_read_toml(Path(path)))


def _parse_entries(root: dict[str, Any], key: str, prefix: str, *, base_dir: Path) -> tuple[WorkflowEntry, ...]:
    tables = root.get(key, [])
    if not isinstance(tables, list):
        raise ValueError(f"Expected array of tables at '{key}'")
    entries = []
    for i, item in enumerate(tables):
        key_path = f"{key}[{i}]"
        table = _require_mapping(item, key_path=key_path)
        path = Path(_get_str(table, "path", key_path=key_path))
        if not path.is_absolute():
            path = (base_dir / path).resolve()
        entries.append(WorkflowEntry(name=_get_str(table, "name", default=f"{prefix}{i + 1}", key_path=key_path), path=path))
    return tuple(entries)


def load_workflow(path: str | Path) -> WorkflowManifest:
    """Read `[[plants]]` and `[[specs]]` tables (paths relative to the manifest) and `[workflow]`."""
    path = Path(path)
    root = _read_toml(path)
    plants = _parse_entries(root, "plants", "G", base_dir=path.parent)
    specs = _parse_entries(root, "specs", "K", base_dir=path.parent)
    if not plants:
        raise ValueError("workflow manifest needs at least one [[plants]] entry")
    if not specs:
        raise ValueError("workflow manifest needs at least one [[specs]] entry")
    workflow_table = _require_mapping(root.get("workflow", {}), key_path="workflow")
    workers = _get_int(workflow_table, "workers", default=1, key_path="workflow")
    if workers < 1:
        raise ValueError(f"workflow.workers must be >= 1, got {workers}")
    return WorkflowManifest(plants=plants, specs=specs, workers=workers)
