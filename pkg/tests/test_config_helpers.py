"""Unit tests for TOML parsing helpers in `hierarchical_supervisor.config`."""

import textwrap
from pathlib import Path

import pytest

from hierarchical_supervisor.config import (
    ToolConfig,
    _get_bool,
    _get_int,
    _get_str,
    _require_mapping,
    load_config,
    load_workflow,
    parse_config,
)
from hierarchical_supervisor.params import ProfileName


def test_require_mapping_validates_type() -> None:
    assert _require_mapping({"x": 1}, key_path="root") == {"x": 1}
    with pytest.raises(ValueError, match="Expected table at 'root'"):
        _require_mapping(123, key_path="root")


def test_get_int_rejects_bools_and_floats() -> None:
    assert _get_int({"a": 3}, "a", key_path="t") == 3
    assert _get_int({}, "a", default=0, key_path="t") == 0
    with pytest.raises(ValueError, match="Missing required key 't.a'"):
        _get_int({}, "a", key_path="t")
    with pytest.raises(ValueError, match="Expected integer at 't.a'"):
        _get_int({"a": True}, "a", key_path="t")
    with pytest.raises(ValueError, match="Expected integer"):
        _get_int({"a": 1.5}, "a", key_path="t")


def test_get_bool_and_defaults() -> None:
    assert _get_bool({"a": True}, "a", key_path="t") is True
    assert _get_bool({}, "a", default=False, key_path="t") is False
    with pytest.raises(ValueError, match="Expected boolean"):
        _get_bool({"a": 1}, "a", key_path="t")


def test_get_str_and_defaults() -> None:
    assert _get_str({"a": "x"}, "a", key_path="t") == "x"
    assert _get_str({}, "a", default="y", key_path="t") == "y"
    with pytest.raises(ValueError, match="Expected string"):
        _get_str({"a": 1}, "a", key_path="t")


def test_load_config_defaults() -> None:
    assert load_config(None) == ToolConfig()
    assert parse_config({}) == ToolConfig()


def test_bundled_default_config_matches_defaults() -> None:
    path = Path(__file__).resolve().parent.parent / "resources" / "default_config.toml"
    assert load_config(path) == ToolConfig()


def test_parse_config_reads_every_section() -> None:
    config = parse_config(
        {
            "checks": {"bound": 12, "workers": 4, "use_sufficient_condition": False},
            "random": {"seed": 9, "profile": "acyclic-small", "max_states": 5},
            "logging": {"level": "debug"},
        }
    )
    assert config.checks.search_bound == 12
    assert config.checks.workers == 4
    assert not config.checks.use_sufficient_condition
    assert config.random.seed == 9
    assert config.random.profile.name is ProfileName.ACYCLIC_SMALL
    assert config.random.profile.max_states == 5
    assert config.random.profile.max_depth == 6
    assert config.logging.level == "DEBUG"


def test_parse_config_rejects_bad_values() -> None:
    with pytest.raises(ValueError, match="Expected table at 'checks'"):
        parse_config({"checks": 3})
    with pytest.raises(ValueError, match="checks.bound must be >= 0"):
        parse_config({"checks": {"bound": -1}})
    with pytest.raises(ValueError, match="acyclic-small"):
        parse_config({"random": {"profile": "acyclic-small", "max_states": 20}})
    with pytest.raises(ValueError):
        parse_config({"random": {"profile": "nope"}})


def test_load_workflow_resolves_paths_and_default_names(tmp_path: Path) -> None:
    manifest = tmp_path / "workflow.toml"
    manifest.write_text(
        textwrap.dedent(
            """
            [[plants]]
            path = "plants/g1.des"

            [[plants]]
            name = "east"
            path = "g2.des"

            [[specs]]
            path = "k.des"

            [workflow]
            workers = 2
            """
        ).strip()
        + "\n",
        encoding="utf-8",
    )
    workflow = load_workflow(manifest)
    assert [e.name for e in workflow.plants] == ["G1", "east"]
    assert workflow.plants[0].path == (tmp_path / "plants" / "g1.des").resolve()
    assert [e.name for e in workflow.specs] == ["K1"]
    assert workflow.workers == 2


def test_load_workflow_errors(tmp_path: Path) -> None:
    manifest = tmp_path / "workflow.toml"
    manifest.write_text('[[specs]]\npath = "k.des"\n', encoding="utf-8")
    with pytest.raises(ValueError, match="at least one \\[\\[plants\\]\\] entry"):
        load_workflow(manifest)
    manifest.write_text('[[plants]]\npath = "g.des"\n[[specs]]\npath = "k.des"\n[workflow]\nworkers = 0\n', encoding="utf-8")
    with pytest.raises(ValueError, match="workflow.workers must be >= 1"):
        load_workflow(manifest)
    manifest.write_text('[[plants]]\nname = "g"\n[[specs]]\npath = "k.des"\n', encoding="utf-8")
    with pytest.raises(ValueError, match="Missing required key 'plants\\[0\\].path'"):
        load_workflow(manifest)


def test_bundled_workflow_manifest(examples_dir: Path) -> None:
    workflow = load_workflow(examples_dir / "railroad" / "workflow.toml")
    assert [e.name for e in workflow.plants] == ["west", "east"]
    assert [e.path.name for e in workflow.specs] == ["k.des"]
    assert all(e.path.exists() for e in (*workflow.plants, *workflow.specs))
