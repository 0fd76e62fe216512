"""Human-readable tables and machine-readable payloads for results."""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from pydantic import BaseModel, Field

from hierarchical_supervisor.hierarchical import ArtifactStats, SynthesisReport
from hierarchical_supervisor.verdict import CheckResult, Verdict, format_word


class VerdictPayload(BaseModel):
    """JSON form of a check result."""

    property: str
    verdict: str = Field(description="holds | violated | bounded_pass")
    proof: str | None = Field(default=None, description="sufficient_condition | exhaustive_finite")
    bound: int | None = None
    counterexample: list[list[str]] = Field(default_factory=list)
    event: str | None = None
    stats: dict[str, int] = Field(default_factory=dict)


class ArtifactPayload(BaseModel):
    name: str
    states: int
    transitions: int
    events: int


class ChoicePayload(BaseModel):
    """Alphabets chosen by the modular workflow."""

    plants: list[str]
    gamma_o: list[str]
    gamma_hi: list[str]
    sigma_o: list[str]
    sigma_hi: list[str]
    attempt: str
    attempts_tried: int


class ReportPayload(BaseModel):
    """JSON form of a synthesis report."""

    name: str
    moc: VerdictPayload
    oc: VerdictPayload
    nonconflicting: bool
    observer: bool
    lcc: bool
    equality_certified: bool | None = Field(default=None, description="null when untested")
    equality_witness: list[str] | None = None
    statistics: list[ArtifactPayload] = Field(default_factory=list)
    choice: ChoicePayload | None = None


def verdict_payload(verdict: Verdict, *, stats: Mapping[str, int] | None = None) -> VerdictPayload:
    merged = {"candidates": verdict.candidates, **(stats or {})}
    return VerdictPayload(
        property=verdict.name,
        verdict=str(verdict.kind),
        proof=str(verdict.proof) if verdict.proof is not None else None,
        bound=verdict.bound,
        counterexample=[list(w) for w in verdict.counterexample],
        event=verdict.event,
        stats=merged,
    )


def check_payload(name: str, result: CheckResult, *, stats: Mapping[str, int] | None = None) -> VerdictPayload:
    """JSON form of a decided (two-valued) check."""
    return VerdictPayload(
        property=name,
        verdict="holds" if result.holds else "violated",
        counterexample=[list(w) for w in result.counterexample],
        event=result.event,
        stats=dict(stats or {}),
    )


def _artifact(stats: ArtifactStats) -> ArtifactPayload:
    return ArtifactPayload(name=stats.name, states=stats.states, transitions=stats.transitions, events=stats.events)


def report_payload(report: SynthesisReport) -> ReportPayload:
    choice = report.choice
    witness = report.equality.witness if report.equality is not None else None
    return ReportPayload(
        name=report.name,
        moc=verdict_payload(report.moc_verdict),
        oc=verdict_payload(report.oc_verdict),
        nonconflicting=report.nonconflicting,
        observer=report.observer,
        lcc=report.lcc,
        equality_certified=report.equality_certified,
        equality_witness=list(witness) if witness is not None else None,
        statistics=[_artifact(s) for s in report.statistics],
        choice=(
            ChoicePayload(
                plants=list(choice.plants),
                gamma_o=list(choice.gamma_o),
                gamma_hi=list(choice.gamma_hi),
                sigma_o=list(choice.sigma_o),
                sigma_hi=list(choice.sigma_hi),
                attempt=str(choice.attempt),
                attempts_tried=choice.attempts_tried,
            )
            if choice is not None
            else None
        ),
    )


def format_table(report: SynthesisReport) -> str:
    """Per-artifact state/transition/event counts followed by the condition summary."""
    header = ("artifact", "states", "transitions", "events")
    rows = [(s.name, str(s.states), str(s.transitions), str(s.events)) for s in report.statistics]
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]

    def line(cells: Sequence[str]) -> str:
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:], strict=True)]
        return "  ".join([first, *rest])

    out = [f"== {report.name} ==", line(header), "  ".join("-" * w for w in widths)]
    out.extend(line(r) for r in rows)
    out.append(report.moc_verdict.describe())
    out.append(report.oc_verdict.describe())
    out.append(f"nonconflicting: {'yes' if report.nonconflicting else 'no'}")
    out.append(f"observer: {'yes' if report.observer else 'no'}, LCC: {'yes' if report.lcc else 'no'}")
    if report.equality is None:
        out.append("equality: untested")
    elif report.equality_certified:
        out.append("equality: certified")
    elif report.equality.equal:
        out.append("equality: not certified (MOC violated; sides agree)")
    else:
        shown = format_word(report.equality.witness) if report.equality.witness is not None else "?"
        out.append(f"equality: refuted (witness {shown})")
    if report.choice is not None:
        c = report.choice
        out.append(
            f"workflow: plants {', '.join(c.plants)}; |Γ_o|={len(c.gamma_o)} |Γ_hi|={len(c.gamma_hi)} "
            f"|Σ_o|={len(c.sigma_o)} |Σ_hi|={len(c.sigma_hi)}; accepted {c.attempt} after {c.attempts_tried} attempt(s)"
        )
    return "\n".join(out)
