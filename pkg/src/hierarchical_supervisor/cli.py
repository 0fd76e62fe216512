"""Command-line interface.

Every command reads and writes `.des` files. Two-operand commands take the
plant file(s) first and the specification file last; several plant files are
composed with `parallel`. The projection context comes from the event flags of
the (composed) plant, and `--highlevel` overrides Σ_hi.

Exit codes: 0 holds / succeeded, 1 violated (counterexample on stdout),
2 inconclusive bounded pass, 64 usage error, 65 malformed input.
"""

from __future__ import annotations

import json
import logging
import sys
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Optional

import click
import typer

from hierarchical_supervisor.automaton import Alphabet, Automaton
from hierarchical_supervisor.config import ToolConfig, load_config, load_workflow
from hierarchical_supervisor.des_format import load_des, serialize_des, to_dot, write_des
from hierarchical_supervisor.errors import SupervisorError
from hierarchical_supervisor.hierarchical import (
    abstract_plant,
    certify_by_extended_observation,
    hier_synthesize_normal,
    verify_equality,
    workflow_modular,
)
from hierarchical_supervisor.language import is_nonblocking
from hierarchical_supervisor.params import CheckParams, ProfileName, RandomProfile
from hierarchical_supervisor.projection import (
    ProjectionContext,
    check_lcc,
    check_observer,
    inverse_project,
    nonconflicting,
    parallel,
    project,
)
from hierarchical_supervisor.relational import check_loc, check_moc, check_oc, sync_pair_product
from hierarchical_supervisor.report import check_payload, format_table, report_payload, verdict_payload
from hierarchical_supervisor.synthesis import (
    SpecPlantPair,
    check_controllability,
    check_normality,
    check_observability,
    sup_con_normal,
    sup_controllable,
    sup_normal_marked,
)
from hierarchical_supervisor.testgen import pspace_gadget, railroad_models, random_instances, write_instance
from hierarchical_supervisor.verdict import EXIT_HOLDS, EXIT_VIOLATED, CheckResult, Verdict, format_word

logger = logging.getLogger(__name__)

EXIT_USAGE = 64
EXIT_MALFORMED = 65

app = typer.Typer(
    name="hierarchical-supervisor",
    help="Hierarchical supervisory control under partial observation",
    no_args_is_help=True,
)
hier_app = typer.Typer(help="Hierarchical synthesis on the abstraction G_hi", no_args_is_help=True)
gen_app = typer.Typer(help="Generate test instances", no_args_is_help=True)
app.add_typer(hier_app, name="hier")
app.add_typer(gen_app, name="gen")


class Property(StrEnum):
    OC = "oc"
    MOC = "moc"
    LOC = "loc"
    CONTROLLABLE = "controllable"
    OBSERVABLE = "observable"
    NORMAL = "normal"
    OBSERVER = "observer"
    LCC = "lcc"
    NONCONFLICTING = "nonconflicting"


class Supremum(StrEnum):
    NORMAL = "normal"
    CONTROLLABLE = "controllable"
    CONNORM = "connorm"


_TWO_OPERAND = {Property.CONTROLLABLE, Property.OBSERVABLE, Property.NORMAL}

ConfigOption = Annotated[Optional[Path], typer.Option("--config", "-c", help="TOML config file")]
JsonFlag = Annotated[bool, typer.Option("--json", help="Print a machine-readable JSON payload")]
DotFlag = Annotated[bool, typer.Option("--dot", help="Emit a Graphviz description instead of .des")]
OutputOption = Annotated[Optional[Path], typer.Option("--output", "-o", help="Write the result here (default stdout)")]
HighlevelOption = Annotated[
    Optional[str], typer.Option("--highlevel", help="Comma-separated high-level events (overrides the h flags)")
]
BoundOption = Annotated[
    Optional[int], typer.Option("--bound", min=0, help="Candidate length bound (default: config, else automatic)")
]
FilesArgument = Annotated[list[Path], typer.Argument(help="Input .des files")]


@app.callback()
def _root(
    ctx: typer.Context,
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING, ...")] = None,
) -> None:
    ctx.obj = {"log_level": log_level}


def _settings(ctx: typer.Context, config: Path | None) -> ToolConfig:
    """Load the config file and configure logging (the --log-level option wins)."""
    with _input_errors():
        settings = load_config(config)
    root = ctx.find_root().obj or {}
    level = (root.get("log_level") or settings.logging.level).upper()
    logging.basicConfig(
        level=logging.getLevelNamesMapping().get(level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    return settings


@contextmanager
def _input_errors() -> Iterator[None]:
    """Report bad input on stderr and exit with the malformed-input code."""
    try:
        yield
    except (SupervisorError, ValueError, OSError) as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_MALFORMED) from exc


def _events(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [e.strip() for e in text.split(",") if e.strip()]


def _load_all(paths: Sequence[Path]) -> list[Automaton]:
    with _input_errors():
        return [load_des(p) for p in paths]


def _compose(automata: Sequence[Automaton]) -> Automaton:
    with _input_errors():
        return parallel(automata)


def _context(plant: Automaton, highlevel: str | None) -> ProjectionContext:
    with _input_errors():
        return ProjectionContext.from_alphabet(plant.alphabet, highlevel=_events(highlevel))


def _split_operands(paths: Sequence[Path]) -> tuple[Automaton, Automaton]:
    if len(paths) < 2:
        raise typer.BadParameter("expected plant file(s) followed by a specification file", param_hint="FILES")
    automata = _load_all(paths)
    return _compose(automata[:-1]), automata[-1]


def _lifted(spec: Automaton, plant: Automaton, ctx: ProjectionContext) -> Automaton:
    """Specification over the plant alphabet, composing with the plant when it is smaller."""
    if spec.alphabet.event_set == plant.alphabet.event_set:
        return spec
    logger.info("Lifting the specification to the plant alphabet")
    with _input_errors():
        return SpecPlantPair(spec, plant, ctx).lifted()


def _emit(a: Automaton, output: Path | None, *, dot: bool) -> None:
    text = to_dot(a) if dot else serialize_des(a)
    if output is None:
        typer.echo(text, nl=False)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
    typer.echo(f"Wrote {output}", err=True)


def _finish_verdict(verdict: Verdict, *, as_json: bool) -> None:
    if as_json:
        typer.echo(verdict_payload(verdict).model_dump_json(indent=2))
    else:
        typer.echo(verdict.describe())
    raise typer.Exit(verdict.exit_code)


def _finish_check(name: str, result: CheckResult, *, as_json: bool) -> None:
    if as_json:
        typer.echo(check_payload(name, result).model_dump_json(indent=2))
    else:
        typer.echo(result.describe(name))
    raise typer.Exit(result.exit_code)


# --- automaton commands -----------------------------------------------------


@app.command()
def validate(
    ctx: typer.Context,
    files: FilesArgument,
    dot: DotFlag = False,
    config: ConfigOption = None,
) -> None:
    """Parse and validate .des files."""
    _settings(ctx, config)
    for path, a in zip(files, _load_all(files), strict=True):
        if dot:
            typer.echo(to_dot(a, name=path.stem), nl=False)
        else:
            typer.echo(f"{path}: ok ({a.num_states} states, {a.num_transitions} transitions, {a.num_events} events)")


@app.command("project")
def project_command(
    ctx: typer.Context,
    file: Annotated[Path, typer.Argument(help="Input .des file")],
    events: Annotated[str, typer.Option("--events", "-e", help="Comma-separated target events")],
    output: OutputOption = None,
    dot: DotFlag = False,
    config: ConfigOption = None,
) -> None:
    """Natural projection onto a sub-alphabet."""
    _settings(ctx, config)
    (a,) = _load_all([file])
    with _input_errors():
        result = project(a, _events(events) or [])
    _emit(result, output, dot=dot)


@app.command()
def invproject(
    ctx: typer.Context,
    file: Annotated[Path, typer.Argument(help="Input .des file")],
    events: Annotated[str, typer.Option("--events", "-e", help="Comma-separated events to add as self-loops")],
    output: OutputOption = None,
    dot: DotFlag = False,
    config: ConfigOption = None,
) -> None:
    """Inverse projection: extend the alphabet with self-loops on new events."""
    _settings(ctx, config)
    (a,) = _load_all([file])
    with _input_errors():
        extra = [e for e in _events(events) or [] if e not in a.alphabet]
        superset = a.alphabet.union(Alphabet(tuple(extra)))
        result = inverse_project(a, superset)
    _emit(result, output, dot=dot)


@app.command("parallel")
def parallel_command(
    ctx: typer.Context,
    files: FilesArgument,
    output: OutputOption = None,
    dot: DotFlag = False,
    config: ConfigOption = None,
) -> None:
    """Synchronous composition of all inputs."""
    _settings(ctx, config)
    _emit(_compose(_load_all(files)), output, dot=dot)


@app.command()
def pairprod(
    ctx: typer.Context,
    left: Annotated[Path, typer.Argument(help="Left .des file")],
    right: Annotated[Path, typer.Argument(help="Right .des file")],
    sync: Annotated[str, typer.Option("--sync", help="Comma-separated synchronization events")],
    output: OutputOption = None,
    dot: DotFlag = False,
    config: ConfigOption = None,
) -> None:
    """Synchronized pair product accepting the relational language of (L(left), L(right))."""
    _settings(ctx, config)
    a, b = _load_all([left, right])
    with _input_errors():
        pa = sync_pair_product(a, b, _events(sync) or [])
    _emit(pa.automaton, output, dot=dot)


@app.command()
def stats(
    ctx: typer.Context,
    files: FilesArgument,
    config: ConfigOption = None,
) -> None:
    """Size and structure of each input."""
    _settings(ctx, config)
    automata = _load_all(files)
    width = max(len(str(p)) for p in files)
    typer.echo(f"{'file'.ljust(width)}  states  transitions  events  deterministic  nonblocking")
    for path, a in zip(files, automata, strict=True):
        typer.echo(
            f"{str(path).ljust(width)}  {a.num_states:6d}  {a.num_transitions:11d}  {a.num_events:6d}  "
            f"{'yes' if a.deterministic else 'no':>13}  {'yes' if is_nonblocking(a) else 'no':>11}"
        )


# --- checks and synthesis ---------------------------------------------------


@app.command()
def check(
    ctx: typer.Context,
    prop: Annotated[Property, typer.Argument(metavar="PROPERTY", help="Property to check")],
    files: FilesArgument,
    bound: BoundOption = None,
    workers: Annotated[Optional[int], typer.Option("--workers", min=1, help="Threads judging candidates")] = None,
    no_sufficient: Annotated[
        bool, typer.Option("--no-sufficient", help="Skip the Σ_o ⊆ Σ_hi / Σ_hi ⊆ Σ_o shortcut")
    ] = False,
    marked: Annotated[bool, typer.Option("--marked", help="Check the (prefix-closed) marked language")] = False,
    highlevel: HighlevelOption = None,
    as_json: JsonFlag = False,
    config: ConfigOption = None,
) -> None:
    """Check a consistency or supervisory property.

    oc, moc, loc, observer and lcc read the plant only; controllable, observable
    and normal also take a specification (last file); nonconflicting composes
    every input.
    """
    settings = _settings(ctx, config)
    with _input_errors():
        params = CheckParams(
            bound=bound if bound is not None else settings.checks.bound,
            workers=workers if workers is not None else settings.checks.workers,
            use_sufficient_condition=settings.checks.use_sufficient_condition and not no_sufficient,
        )
    language = "marked" if marked else "generated"

    if prop is Property.NONCONFLICTING:
        automata = _load_all(files)
        _finish_check("nonconflicting", CheckResult(holds=nonconflicting(automata)), as_json=as_json)
    if prop in _TWO_OPERAND:
        plant, spec = _split_operands(files)
        pctx = _context(plant, highlevel)
        k = _lifted(spec, plant, pctx)
        with _input_errors():
            if prop is Property.CONTROLLABLE:
                result = check_controllability(k, plant, pctx.sigma_uc)
            elif prop is Property.OBSERVABLE:
                result = check_observability(k, plant, pctx)
            else:
                result = check_normality(k, plant, pctx)
        _finish_check(str(prop), result, as_json=as_json)

    plant = _compose(_load_all(files))
    pctx = _context(plant, highlevel)
    with _input_errors():
        if prop is Property.OBSERVER:
            _finish_check("observer", check_observer(plant, pctx), as_json=as_json)
        if prop is Property.LCC:
            _finish_check("LCC", check_lcc(plant, pctx), as_json=as_json)
        if prop is Property.LOC:
            verdict = check_loc(plant, pctx, bound=params.search_bound, workers=params.workers, language=language)
        else:
            checker = check_oc if prop is Property.OC else check_moc
            verdict = checker(
                plant,
                pctx,
                bound=params.search_bound,
                workers=params.workers,
                use_sufficient_condition=params.use_sufficient_condition,
                language=language,
            )
    _finish_verdict(verdict, as_json=as_json)


@app.command()
def sup(
    ctx: typer.Context,
    kind: Annotated[Supremum, typer.Argument(metavar="KIND", help="normal, controllable or connorm")],
    files: FilesArgument,
    output: OutputOption = None,
    dot: DotFlag = False,
    highlevel: HighlevelOption = None,
    config: ConfigOption = None,
) -> None:
    """Supremal normal / controllable / controllable-and-normal sublanguage of the specification."""
    _settings(ctx, config)
    plant, spec = _split_operands(files)
    pctx = _context(plant, highlevel)
    k = _lifted(spec, plant, pctx)
    with _input_errors():
        if kind is Supremum.NORMAL:
            result = sup_normal_marked(k, plant, pctx)
        elif kind is Supremum.CONTROLLABLE:
            result = sup_controllable(k, plant, pctx.sigma_uc)
        else:
            result = sup_con_normal(k, plant, pctx)
    logger.info("sup %s: %d states", kind, result.num_states)
    _emit(result, output, dot=dot)


# --- hierarchical -----------------------------------------------------------


@hier_app.command("abstract")
def hier_abstract(
    ctx: typer.Context,
    files: FilesArgument,
    output: OutputOption = None,
    dot: DotFlag = False,
    highlevel: HighlevelOption = None,
    config: ConfigOption = None,
) -> None:
    """High-level plant G_hi = Q(G)."""
    _settings(ctx, config)
    plant = _compose(_load_all(files))
    pctx = _context(plant, highlevel)
    with _input_errors():
        result = abstract_plant(plant, pctx)
    _emit(result, output, dot=dot)


@hier_app.command("synth")
def hier_synth(
    ctx: typer.Context,
    files: FilesArgument,
    bound: BoundOption = None,
    verify: Annotated[bool, typer.Option("--verify", help="Compare with the low-level supremum")] = False,
    output: OutputOption = None,
    highlevel: HighlevelOption = None,
    as_json: JsonFlag = False,
    config: ConfigOption = None,
) -> None:
    """Synthesize the high-level supremal normal supervisor; -o writes it as .des."""
    settings = _settings(ctx, config)
    plant, spec = _split_operands(files)
    pctx = _context(plant, highlevel)
    with _input_errors():
        report = hier_synthesize_normal(
            plant,
            spec,
            pctx,
            bound=bound or settings.checks.search_bound,
            verify=verify,
            workers=settings.checks.workers,
            use_sufficient_condition=settings.checks.use_sufficient_condition,
            name=files[-1].stem,
        )
    if output is not None:
        write_des(report.high_supervisor, output)
        typer.echo(f"Wrote {output}", err=True)
    typer.echo(report_payload(report).model_dump_json(indent=2) if as_json else format_table(report))
    if report.equality_certified is False:
        raise typer.Exit(EXIT_VIOLATED)


@hier_app.command("verify")
def hier_verify(
    ctx: typer.Context,
    files: FilesArgument,
    highlevel: HighlevelOption = None,
    config: ConfigOption = None,
) -> None:
    """Check supN(K ∥ L_m, L, P) = supN(K, Q(L), P_hi) ∥ L_m."""
    _settings(ctx, config)
    plant, spec = _split_operands(files)
    pctx = _context(plant, highlevel)
    with _input_errors():
        result = verify_equality(plant, spec, pctx)
    if result.equal:
        typer.echo(
            f"equality: holds (closed loop {result.composed.num_states} states, "
            f"referential {result.referential.num_states} states)"
        )
        raise typer.Exit(EXIT_HOLDS)
    shown = format_word(result.witness) if result.witness is not None else "?"
    typer.echo(f"equality: violated: {shown}")
    raise typer.Exit(EXIT_VIOLATED)


@hier_app.command("extobs")
def hier_extobs(
    ctx: typer.Context,
    files: FilesArgument,
    highlevel: HighlevelOption = None,
    config: ConfigOption = None,
) -> None:
    """Certify the high-level supervisor by extending the observation to Σ_o ∪ Σ_hi."""
    _settings(ctx, config)
    plant, spec = _split_operands(files)
    pctx = _context(plant, highlevel)
    with _input_errors():
        result = certify_by_extended_observation(plant, spec, pctx)
    if result.certified:
        typer.echo("extended observation: certified")
        raise typer.Exit(EXIT_HOLDS)
    reason = "conflicting" if not result.nonconflicting else "closed loops differ"
    shown = f" ({format_word(result.witness)})" if result.witness is not None else ""
    typer.echo(f"extended observation: not certified: {reason}{shown}")
    raise typer.Exit(EXIT_VIOLATED)


@hier_app.command("workflow")
def hier_workflow(
    ctx: typer.Context,
    manifest: Annotated[Path, typer.Argument(help="Workflow manifest (TOML)")],
    bound: BoundOption = None,
    as_json: JsonFlag = False,
    config: ConfigOption = None,
) -> None:
    """Run the modular workflow for every specification of a manifest."""
    settings = _settings(ctx, config)
    with _input_errors():
        spec = load_workflow(manifest)
    plants = _load_all([e.path for e in spec.plants])
    specs = _load_all([e.path for e in spec.specs])
    with _input_errors():
        reports = workflow_modular(
            plants,
            specs,
            plant_names=[e.name for e in spec.plants],
            spec_names=[e.name for e in spec.specs],
            bound=bound or settings.checks.search_bound,
            workers=spec.workers,
        )
    if as_json:
        typer.echo(json.dumps([report_payload(r).model_dump(mode="json") for r in reports], indent=2))
    else:
        typer.echo("\n\n".join(format_table(r) for r in reports))


# --- generators -------------------------------------------------------------


@gen_app.command("gadget")
def gen_gadget(
    ctx: typer.Context,
    file: Annotated[Path, typer.Argument(help="NFA .des file with every state marked")],
    output: OutputOption = None,
    dot: DotFlag = False,
    config: ConfigOption = None,
) -> None:
    """Build the MOC instance that is MOC iff the NFA is universal (flags encode Σ_o and Σ_hi)."""
    _settings(ctx, config)
    (a,) = _load_all([file])
    with _input_errors():
        b, _ = pspace_gadget(a)
    _emit(b, output, dot=dot)


@gen_app.command("random")
def gen_random(
    ctx: typer.Context,
    out_dir: Annotated[Path, typer.Option("--out-dir", "-d", help="Directory for the instance bundles")],
    seed: Annotated[Optional[int], typer.Option("--seed", help="Base seed (default: config)")] = None,
    count: Annotated[int, typer.Option("--count", "-n", min=1, help="Number of instances")] = 1,
    profile: Annotated[Optional[ProfileName], typer.Option("--profile", help="Generation profile")] = None,
    prefix_closed: Annotated[bool, typer.Option("--prefix-closed", help="Mark every state")] = False,
    config: ConfigOption = None,
) -> None:
    """Write reproducible random plant/spec bundles, one directory per instance."""
    settings = _settings(ctx, config)
    limits = settings.random.profile if profile is None else RandomProfile.named(profile)
    base = settings.random.seed if seed is None else seed
    for index, instance in enumerate(random_instances(base, count, limits, prefix_closed=prefix_closed)):
        manifest = write_instance(instance, out_dir / f"instance_{index:03d}")
        typer.echo(f"Wrote {manifest} (seed {instance.seed})")


@gen_app.command("railroad")
def gen_railroad(
    ctx: typer.Context,
    out_dir: Annotated[Path, typer.Option("--out-dir", "-d", help="Directory for g1.des, g2.des and k.des")],
    observe_entries: Annotated[
        bool, typer.Option("--observe-entries", help="Make entry events observable (the plant is then not MOC)")
    ] = False,
    config: ConfigOption = None,
) -> None:
    """Write the two-train bridge plants and the mutual-exclusion specification."""
    _settings(ctx, config)
    models = railroad_models(hide_entries=not observe_entries)
    for name, a in (("g1", models.west), ("g2", models.east), ("k", models.spec)):
        typer.echo(f"Wrote {write_des(a, out_dir / f'{name}.des')}")


# --- service ----------------------------------------------------------------


@app.command()
def serve(
    host: Annotated[str, typer.Option("--host", help="Bind address")] = "127.0.0.1",
    port: Annotated[int, typer.Option("--port", "-p", help="Port")] = 8011,
) -> None:
    """Start the HTTP API."""
    import uvicorn

    uvicorn.run("hierarchical_supervisor.api:app", host=host, port=port)


def main(argv: list[str] | None = None) -> None:
    """Entry point for the CLI.

    Args:
        argv: Optional argument list (without the program name); defaults to `sys.argv[1:]`.
    """
    try:
        code = app(args=argv, prog_name="hierarchical-supervisor", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        code = EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        code = EXIT_MALFORMED
    except click.exceptions.Abort:
        typer.echo("Aborted!", err=True)
        code = 1
    sys.exit(code if isinstance(code, int) else 0)
