"""CLI-related tests.

These tests focus on:
- Command registration and exit codes
- Checks and synthesis on the bundled example files
- Generators writing reproducible bundles
"""

import ast
import json
import re
import sys
import textwrap
import tomllib
from pathlib import Path

import pytest
from typer.testing import CliRunner

from hierarchical_supervisor.cli import EXIT_MALFORMED, EXIT_USAGE, app, main
from hierarchical_supervisor.des_format import parse_des
from hierarchical_supervisor.language import enumerate_language

runner = CliRunner()


@pytest.fixture
def example3(examples_dir: Path) -> tuple[str, str]:
    return str(examples_dir / "example3" / "plant.des"), str(examples_dir / "example3" / "spec.des")


@pytest.fixture
def railroad(examples_dir: Path) -> list[str]:
    return [str(examples_dir / "railroad" / f"{name}.des") for name in ("g1", "g2", "k")]


def test_cli_has_expected_commands() -> None:
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    for command in ("validate", "check", "sup", "hier", "gen", "serve"):
        assert command in result.stdout


def test_validate_reports_sizes(example3: tuple[str, str]) -> None:
    plant, _ = example3
    result = runner.invoke(app, ["validate", plant])
    assert result.exit_code == 0
    assert f"{plant}: ok (7 states, 6 transitions, 3 events)" in result.stdout


def test_validate_dot(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["validate", "--dot", example3[1]])
    assert result.exit_code == 0
    assert result.stdout.startswith('digraph "spec" {')


def test_malformed_input_exits_65(tmp_path: Path) -> None:
    broken = tmp_path / "broken.des"
    broken.write_text("events: a\nstates p\n", encoding="utf-8")
    result = runner.invoke(app, ["validate", str(broken)])
    assert result.exit_code == EXIT_MALFORMED
    assert "error: line 2: broken.des:" in result.output


def test_check_moc_prints_counterexample(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["check", "moc", example3[0], "--bound", "8"])
    assert result.exit_code == 1
    assert "MOC: violated: c | bc" in result.stdout


def test_check_json_payload(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["check", "moc", example3[0], "--json"])
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["verdict"] == "violated"
    assert payload["counterexample"] == [["c"], ["b", "c"]]


def test_check_oc_holds(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["check", "oc", example3[0]])
    assert result.exit_code == 0
    assert result.stdout.strip() == "OC: holds (exhaustive (finite))"


def test_check_bounded_pass_exits_2(railroad: list[str]) -> None:
    result = runner.invoke(app, ["check", "moc", *railroad[:2], "--no-sufficient", "--bound", "6"])
    assert result.exit_code == 2
    assert "inconclusive" in result.stdout


def test_check_highlevel_override(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["check", "moc", example3[0], "--highlevel", "a,b,c"])
    assert result.exit_code == 0
    assert "sufficient condition" in result.stdout


def test_check_two_operand_properties(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["check", "normal", *example3])
    assert result.exit_code == 1
    assert "normal: violated: bac" in result.stdout
    result = runner.invoke(app, ["check", "controllable", *example3])
    assert result.exit_code == 0


def test_sup_normal_writes_des(example3: tuple[str, str], tmp_path: Path) -> None:
    out = tmp_path / "sup.des"
    result = runner.invoke(app, ["sup", "normal", *example3, "-o", str(out)])
    assert result.exit_code == 0
    language = enumerate_language(parse_des(out.read_text(encoding="utf-8")), 4).as_set()
    assert language == {(), ("a",), ("b",), ("c",), ("b", "a")}


def test_project_and_parallel(example3: tuple[str, str], railroad: list[str]) -> None:
    result = runner.invoke(app, ["project", example3[0], "--events", "b,c"])
    assert result.exit_code == 0
    assert parse_des(result.stdout).alphabet.events == ("b", "c")
    result = runner.invoke(app, ["parallel", *railroad[:2]])
    assert result.exit_code == 0
    assert parse_des(result.stdout).num_states == 9


def test_pairprod(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["pairprod", example3[1], example3[1], "--sync", "b"])
    assert result.exit_code == 0
    assert "b|b" in parse_des(result.stdout).alphabet.events


def test_hier_synth_exits_1_when_equality_is_refuted(example3: tuple[str, str], tmp_path: Path) -> None:
    out = tmp_path / "supervisor.des"
    result = runner.invoke(app, ["hier", "synth", *example3, "--verify", "-o", str(out)])
    assert result.exit_code == 1
    assert "== spec ==" in result.stdout
    assert "equality: refuted (witness c)" in result.stdout
    assert enumerate_language(parse_des(out.read_text(encoding="utf-8")), 3).as_set() == {(), ("b",)}


def test_hier_verify(example3: tuple[str, str], railroad: list[str]) -> None:
    result = runner.invoke(app, ["hier", "verify", *example3])
    assert result.exit_code == 1
    assert "equality: violated: c" in result.stdout
    result = runner.invoke(app, ["hier", "verify", *railroad])
    assert result.exit_code == 0
    assert result.stdout.startswith("equality: holds")


def test_hier_extobs(example3: tuple[str, str]) -> None:
    result = runner.invoke(app, ["hier", "extobs", *example3])
    assert result.exit_code == 1
    assert "extended observation: not certified: closed loops differ (c)" in result.stdout


def test_hier_workflow(examples_dir: Path) -> None:
    manifest = examples_dir / "railroad" / "workflow.toml"
    result = runner.invoke(app, ["hier", "workflow", str(manifest)])
    assert result.exit_code == 0
    assert "== mutex ==" in result.stdout
    assert "equality: certified" in result.stdout
    result = runner.invoke(app, ["hier", "workflow", str(manifest), "--json"])
    assert result.exit_code == 0
    (report,) = json.loads(result.stdout)
    assert report["name"] == "mutex"
    assert report["choice"]["plants"] == ["west", "east"]


def test_gen_railroad_matches_bundled_files(tmp_path: Path, examples_dir: Path) -> None:
    result = runner.invoke(app, ["gen", "railroad", "--out-dir", str(tmp_path)])
    assert result.exit_code == 0
    for name in ("g1", "g2", "k"):
        generated = (tmp_path / f"{name}.des").read_text(encoding="utf-8")
        assert generated == (examples_dir / "railroad" / f"{name}.des").read_text(encoding="utf-8")


def test_gen_random_writes_bundles(tmp_path: Path) -> None:
    args = ["gen", "random", "--out-dir", str(tmp_path), "--seed", "3", "--count", "2", "--profile", "acyclic-small"]
    result = runner.invoke(app, args)
    assert result.exit_code == 0
    for index in range(2):
        bundle = tmp_path / f"instance_{index:03d}"
        assert (bundle / "manifest.toml").exists()
        assert (bundle / "plant.des").exists()
        assert (bundle / "spec.des").exists()


def test_gen_gadget(tmp_path: Path) -> None:
    nfa = tmp_path / "nfa.des"
    nfa.write_text("events: a\nstates: p\ninitial: p\nmarked: p\ntrans: p a p\n", encoding="utf-8")
    result = runner.invoke(app, ["gen", "gadget", str(nfa)])
    assert result.exit_code == 0
    gadget = parse_des(result.stdout)
    assert gadget.alphabet.observable == frozenset({"a", "@"})
    assert gadget.alphabet.highlevel == frozenset({"a", "#"})


def test_config_file_controls_the_bound(tmp_path: Path, example3: tuple[str, str]) -> None:
    config = tmp_path / "config.toml"
    config.write_text(
        textwrap.dedent(
            """
            [checks]
            bound = 1
            use_sufficient_condition = false
            """
        ).strip()
        + "\n",
        encoding="utf-8",
    )
    result = runner.invoke(app, ["check", "moc", example3[0], "--config", str(config)])
    assert result.exit_code == 2
    assert "no violation up to bound 1" in result.stdout

    config.write_text("[checks]\nworkers = 0\n", encoding="utf-8")
    result = runner.invoke(app, ["check", "moc", example3[0], "--config", str(config)])
    assert result.exit_code == EXIT_MALFORMED


def test_main_maps_usage_errors_to_64() -> None:
    with pytest.raises(SystemExit) as exc_info:
        main(["check"])
    assert exc_info.value.code == EXIT_USAGE


def test_main_reports_missing_specification(example3: tuple[str, str]) -> None:
    with pytest.raises(SystemExit) as exc_info:
        main(["hier", "verify", example3[0]])
    assert exc_info.value.code == EXIT_USAGE


def test_main_returns_verdict_exit_code(example3: tuple[str, str]) -> None:
    with pytest.raises(SystemExit) as exc_info:
        main(["check", "oc", example3[0]])
    assert exc_info.value.code == 0


def test_every_third_party_import_is_declared() -> None:
    root = Path(__file__).resolve().parent.parent
    declared = {
        re.split(r"[<>=!~\[ ]", dep, maxsplit=1)[0].lower()
        for dep in tomllib.loads((root / "pyproject.toml").read_text())["project"]["dependencies"]
    }
    imported: set[str] = set()
    for module in (root / "src" / "hierarchical_supervisor").glob("*.py"):
        for node in ast.walk(ast.parse(module.read_text())):
            if isinstance(node, ast.Import):
                imported.update(alias.name.split(".")[0] for alias in node.names)
            elif isinstance(node, ast.ImportFrom) and node.level == 0 and node.module:
                imported.add(node.module.split(".")[0])
    third_party = imported - set(sys.stdlib_module_names) - {"hierarchical_supervisor"}
    assert "click" in third_party
    assert third_party <= declared
