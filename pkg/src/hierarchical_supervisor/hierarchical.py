"""Hierarchical supervisor synthesis under partial observation.

The plant G is abstracted to G_hi by Q. A supremal normal supervisor is computed
for the high-level specification K against G_hi (observation P_hi) and then
implemented at the low level by composing it with G. When L(G) is MOC and the
supervisor is nonconflicting with L_m(G), the composition equals the supremal
normal sublanguage computed directly at the low level.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum

from hierarchical_supervisor.automaton import Automaton, Word
from hierarchical_supervisor.errors import AlphabetMismatch, BlockingPlant, SpecNotInAbstraction
from hierarchical_supervisor.language import blocking_states, difference_witness, equivalent, included, trim
from hierarchical_supervisor.projection import (
    ProjectionContext,
    check_lcc,
    check_observer,
    extend_observer_lcc,
    nonconflicting,
    parallel,
    project,
)
from hierarchical_supervisor.relational import check_loc, check_moc, check_oc
from hierarchical_supervisor.synthesis import (
    check_controllability,
    check_normality,
    check_observability,
    closed_loop,
    sup_con_normal,
    sup_normal_marked,
)
from hierarchical_supervisor.verdict import Verdict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArtifactStats:
    """Size of one automaton in a synthesis run."""

    name: str
    states: int
    transitions: int
    events: int

    @classmethod
    def of(cls, name: str, a: Automaton) -> ArtifactStats:
        return cls(name=name, states=a.num_states, transitions=a.num_transitions, events=a.num_events)


@dataclass(frozen=True)
class EqualityResult:
    """Both sides of the hierarchical equality and whether they agree."""

    equal: bool
    composed: Automaton
    referential: Automaton
    witness: Word | None = None


class WorkflowAttempt(StrEnum):
    ABSTRACTION = "abstraction"
    SHRUNK = "shrunk"
    REFERENTIAL = "referential"


@dataclass(frozen=True)
class WorkflowChoice:
    """Alphabets considered and chosen by the modular workflow for one specification."""

    plants: tuple[str, ...]
    gamma_o: tuple[str, ...]
    gamma_hi: tuple[str, ...]
    sigma_o: tuple[str, ...]
    sigma_hi: tuple[str, ...]
    attempt: WorkflowAttempt
    attempts_tried: int


@dataclass(frozen=True)
class SynthesisReport:
    """Outcome of one hierarchical synthesis run."""

    name: str
    moc_verdict: Verdict
    oc_verdict: Verdict
    nonconflicting: bool
    observer: bool
    lcc: bool
    high_supervisor: Automaton
    low_closed_loop: Automaton
    equality: EqualityResult | None = None
    statistics: tuple[ArtifactStats, ...] = ()
    choice: WorkflowChoice | None = None

    @property
    def equality_certified(self) -> bool | None:
        """None when untested; False whenever MOC is violated, even if both sides agree."""
        if self.equality is None:
            return None
        return self.equality.equal and not self.moc_verdict.is_violated


@dataclass(frozen=True)
class ConsistencyDiagnostics:
    """High- and low-level controllability, observability and normality of a specification.

    The `hypotheses` record which consistency conditions held for the instance.
    """

    high_controllable: bool
    low_controllable: bool
    high_observable: bool
    low_observable: bool
    high_normal: bool
    low_normal: bool
    hypotheses: dict[str, bool] = field(default_factory=dict)

    @property
    def agree(self) -> dict[str, bool]:
        return {
            "controllable": self.high_controllable == self.low_controllable,
            "observable": self.high_observable == self.low_observable,
            "normal": self.high_normal == self.low_normal,
        }


def abstract_plant(g: Automaton, ctx: ProjectionContext) -> Automaton:
    """G_hi with L(G_hi) = Q(L(G)) and L_m(G_hi) = Q(L_m(G))."""
    return project(g, ctx.sigma_hi, alphabet=ctx.high_alphabet)


def _require_nonblocking(g: Automaton) -> None:
    blocked = blocking_states(g)
    if blocked:
        raise BlockingPlant(blocked[0])


def _require_high_spec(k: Automaton, g_hi: Automaton, ctx: ProjectionContext) -> None:
    if k.alphabet.event_set != ctx.sigma_hi:
        raise AlphabetMismatch(k.alphabet.events, g_hi.alphabet.events, reason="specification must be over Σ_hi")
    result = included(k, g_hi)
    if not result:
        raise SpecNotInAbstraction(result.counterexample[0])


def _high_supervisor(k: Automaton, g_hi: Automaton, ctx: ProjectionContext) -> Automaton:
    return sup_normal_marked(k, g_hi, ctx.high_level_context())


def _equality(g: Automaton, k: Automaton, ctx: ProjectionContext, composed: Automaton) -> EqualityResult:
    referential = sup_normal_marked(trim(parallel([k, g])), g, ctx)
    equal = equivalent(composed, referential)
    witness = None if equal else difference_witness(composed, referential)
    return EqualityResult(equal=equal, composed=composed, referential=referential, witness=witness)


def hier_synthesize_normal(
    g: Automaton,
    k: Automaton,
    ctx: ProjectionContext,
    *,
    bound: int | None = None,
    verify: bool = False,
    workers: int = 1,
    use_sufficient_condition: bool = True,
    name: str = "K",
) -> SynthesisReport:
    """Synthesize the high-level supremal normal supervisor and its low-level closed loop.

    Raises:
        BlockingPlant: `g` is blocking.
        SpecNotInAbstraction: L_m(k) ⊄ Q(L_m(g)).
    """
    _require_nonblocking(g)
    g_hi = abstract_plant(g, ctx)
    _require_high_spec(k, g_hi, ctx)

    moc = check_moc(g, ctx, bound=bound, workers=workers, use_sufficient_condition=use_sufficient_condition)
    oc = check_oc(g, ctx, bound=bound, workers=workers, use_sufficient_condition=use_sufficient_condition)
    if moc.is_violated:
        logger.warning("%s: MOC violated (%s); the closed loop may be smaller than optimal", name, moc.describe())
    elif moc.is_bounded_pass:
        logger.warning("%s: %s; proceeding", name, moc.describe())

    supervisor = _high_supervisor(k, g_hi, ctx)
    joint = nonconflicting([supervisor, g])
    if not joint:
        logger.warning("%s: high-level supervisor conflicts with L_m(G)", name)
    loop = closed_loop(supervisor, g)
    equality = _equality(g, k, ctx, loop) if verify else None
    if equality is not None:
        if not equality.equal:
            outcome = "refuted"
        elif moc.is_violated:
            outcome = "not certified (MOC violated)"
        else:
            outcome = "certified"
        logger.info("%s: equality %s", name, outcome)

    report = SynthesisReport(
        name=name,
        moc_verdict=moc,
        oc_verdict=oc,
        nonconflicting=joint,
        observer=check_observer(g, ctx).holds,
        lcc=check_lcc(g, ctx).holds,
        high_supervisor=supervisor,
        low_closed_loop=loop,
        equality=equality,
        statistics=(
            ArtifactStats.of("spec", k),
            ArtifactStats.of("plant", g),
            ArtifactStats.of("high plant", g_hi),
            ArtifactStats.of("high supervisor", supervisor),
            ArtifactStats.of("closed loop", loop),
        ),
    )
    logger.info(
        "%s: supervisor %d states, closed loop %d states", name, supervisor.num_states, loop.num_states
    )
    return report


def verify_equality(g: Automaton, k: Automaton, ctx: ProjectionContext) -> EqualityResult:
    """Compare supN(K ∥ L_m, L, P) with supN(K, Q(L), P_hi) ∥ L_m.

    Raises:
        BlockingPlant: `g` is blocking.
        SpecNotInAbstraction: L_m(k) ⊄ Q(L_m(g)).
    """
    _require_nonblocking(g)
    g_hi = abstract_plant(g, ctx)
    _require_high_spec(k, g_hi, ctx)
    composed = closed_loop(_high_supervisor(k, g_hi, ctx), g)
    return _equality(g, k, ctx, composed)


def thm1_diagnostics(
    g: Automaton, k: Automaton, ctx: ProjectionContext, *, bound: int | None = None
) -> ConsistencyDiagnostics:
    """Evaluate controllability, observability and normality of K at the high level and of K ∥ L_m(G) at the low level.

    Raises:
        BlockingPlant: `g` is blocking.
    """
    _require_nonblocking(g)
    g_hi = abstract_plant(g, ctx)
    high_ctx = ctx.high_level_context()
    low_spec = trim(parallel([k, g]))
    hypotheses = {
        "oc": not check_oc(g, ctx, bound=bound).is_violated,
        "loc": not check_loc(g, ctx, bound=bound).is_violated,
        "observer": check_observer(g, ctx).holds,
        "lcc": check_lcc(g, ctx).holds,
        "nonconflicting": nonconflicting([k, g]),
    }
    return ConsistencyDiagnostics(
        high_controllable=check_controllability(k, g_hi, high_ctx.sigma_uc).holds,
        low_controllable=check_controllability(low_spec, g, ctx.sigma_uc).holds,
        high_observable=check_observability(k, g_hi, high_ctx).holds,
        low_observable=check_observability(low_spec, g, ctx).holds,
        high_normal=check_normality(k, g_hi, high_ctx).holds,
        low_normal=check_normality(low_spec, g, ctx).holds,
        hypotheses=hypotheses,
    )


# --- modular workflow -------------------------------------------------------


def _supervise(
    g_low: Automaton, spec: Automaton, sigma_o: frozenset[str], sigma_hi: frozenset[str]
) -> tuple[ProjectionContext, Automaton, Automaton]:
    """High-level supremal controllable and normal supervisor for `spec` and its closed loop."""
    ctx = ProjectionContext(sigma=g_low.alphabet, sigma_o=sigma_o, sigma_hi=sigma_hi)
    g_hi = abstract_plant(g_low, ctx)
    k_hi = trim(parallel([spec, g_hi]))
    supervisor = sup_con_normal(k_hi, g_hi, ctx.high_level_context())
    return ctx, supervisor, closed_loop(supervisor, g_low)


def _workflow_one(
    name: str,
    spec: Automaton,
    plants: Sequence[tuple[str, Automaton]],
    *,
    bound: int | None,
) -> SynthesisReport:
    # Step 1: plants sharing an event with the specification.
    sharing = [(pname, p) for pname, p in plants if p.alphabet.event_set & spec.alphabet.event_set]
    if not sharing:
        raise AlphabetMismatch(spec.alphabet.events, (), reason=f"{name} shares no event with any plant")
    g_low = parallel([p for _, p in sharing])
    if not spec.alphabet.event_set <= g_low.alphabet.event_set:
        raise AlphabetMismatch(spec.alphabet.events, g_low.alphabet.events, reason="spec events must be plant events")
    logger.info("%s: composed %d plant(s) into %d states", name, len(sharing), g_low.num_states)

    # Steps 2-3: Γ_o = events of K, extended to an observer/LCC alphabet Γ_hi.
    gamma_o = g_low.alphabet.sorted_events(spec.alphabet.events)
    gamma_hi = extend_observer_lcc(g_low, gamma_o)
    logger.info("%s: Γ_o has %d events, Γ_hi has %d events", name, len(gamma_o), len(gamma_hi))

    # Step 4: referential supervisor with Σ_o = Σ_hi = Γ_hi.
    _, _, reference = _supervise(g_low, spec, frozenset(gamma_hi), frozenset(gamma_hi))

    # Step 5: Σ_o = Σ_hi = Γ_o, then Σ_o = Γ_hi with Σ_hi shrinking towards Γ_o.
    extension = gamma_hi[len(gamma_o) :]
    attempts: list[tuple[WorkflowAttempt, frozenset[str], frozenset[str]]] = [
        (WorkflowAttempt.ABSTRACTION, frozenset(gamma_o), frozenset(gamma_o))
    ]
    for removed in range(1, len(extension) + 1):
        kept = frozenset(gamma_o) | frozenset(extension[: len(extension) - removed])
        attempts.append((WorkflowAttempt.SHRUNK, frozenset(gamma_hi), kept))

    chosen: tuple[ProjectionContext, Automaton, Automaton] | None = None
    attempt = WorkflowAttempt.REFERENTIAL
    tried = 0
    for kind, sigma_o, sigma_hi in attempts:
        tried += 1
        candidate = _supervise(g_low, spec, sigma_o, sigma_hi)
        if equivalent(candidate[2], reference):
            chosen, attempt = candidate, kind
            logger.info("%s: accepted %s attempt with |Σ_hi| = %d", name, kind, len(sigma_hi))
            break
        logger.debug("%s: %s attempt with |Σ_hi| = %d rejected", name, kind, len(sigma_hi))
    if chosen is None:
        logger.info("%s: falling back to the referential supervisor", name)
        chosen = _supervise(g_low, spec, frozenset(gamma_hi), frozenset(gamma_hi))
    ctx, supervisor, loop = chosen
    if not equivalent(loop, reference):
        raise AssertionError(f"{name}: accepted closed loop differs from the referential one")

    g_hi = abstract_plant(g_low, ctx)
    return SynthesisReport(
        name=name,
        moc_verdict=check_moc(g_low, ctx, bound=bound),
        oc_verdict=check_oc(g_low, ctx, bound=bound),
        nonconflicting=nonconflicting([supervisor, g_low]),
        observer=check_observer(g_low, ctx).holds,
        lcc=check_lcc(g_low, ctx).holds,
        high_supervisor=supervisor,
        low_closed_loop=loop,
        equality=EqualityResult(equal=True, composed=loop, referential=reference),
        statistics=(
            ArtifactStats.of("spec", spec),
            ArtifactStats.of("plant", g_low),
            ArtifactStats.of("high plant", g_hi),
            ArtifactStats.of("high supervisor", supervisor),
            ArtifactStats.of("closed loop", loop),
        ),
        choice=WorkflowChoice(
            plants=tuple(pname for pname, _ in sharing),
            gamma_o=tuple(gamma_o),
            gamma_hi=tuple(gamma_hi),
            sigma_o=g_low.alphabet.sorted_events(ctx.sigma_o),
            sigma_hi=g_low.alphabet.sorted_events(ctx.sigma_hi),
            attempt=attempt,
            attempts_tried=tried,
        ),
    )


def workflow_modular(
    plants: Sequence[Automaton],
    specs: Sequence[Automaton],
    *,
    plant_names: Sequence[str] | None = None,
    spec_names: Sequence[str] | None = None,
    bound: int | None = None,
    workers: int = 1,
) -> list[SynthesisReport]:
    """Run the modular workflow for every specification; reports follow input order."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    pnames = list(plant_names) if plant_names is not None else [f"G{i + 1}" for i in range(len(plants))]
    snames = list(spec_names) if spec_names is not None else [f"K{i + 1}" for i in range(len(specs))]
    if len(pnames) != len(plants) or len(snames) != len(specs):
        raise ValueError("names must match the number of plants and specifications")
    named_plants = list(zip(pnames, plants, strict=True))

    def run(item: tuple[str, Automaton]) -> SynthesisReport:
        return _workflow_one(item[0], item[1], named_plants, bound=bound)

    items = list(zip(snames, specs, strict=True))
    if workers == 1:
        return [run(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, items))


@dataclass(frozen=True)
class ExtendedObservationResult:
    """Closed loops under Σ_o and under Σ_o ∪ Σ_hi."""

    certified: bool
    supervisor: Automaton
    closed_loop: Automaton
    extended_closed_loop: Automaton
    nonconflicting: bool
    witness: Word | None = None


def certify_by_extended_observation(g: Automaton, k: Automaton, ctx: ProjectionContext) -> ExtendedObservationResult:
    """Certify the high-level supervisor without an MOC check.

    With Σ_o' = Σ_o ∪ Σ_hi the abstraction satisfies Σ_hi ⊆ Σ_o', so the
    composed closed loop under Σ_o' is the low-level optimum for Σ_o', which
    contains the optimum for Σ_o. The composed closed loop under Σ_o is always
    contained in the optimum for Σ_o. Equal closed loops, with the extended
    supervisor nonconflicting, therefore pin the first one as optimal.

    Raises:
        BlockingPlant: `g` is blocking.
        SpecNotInAbstraction: L_m(k) ⊄ Q(L_m(g)).
    """
    _require_nonblocking(g)
    g_hi = abstract_plant(g, ctx)
    _require_high_spec(k, g_hi, ctx)
    supervisor = _high_supervisor(k, g_hi, ctx)
    loop = closed_loop(supervisor, g)

    extended = ctx.with_sets(observable=ctx.sigma_o | ctx.sigma_hi)
    extended_supervisor = _high_supervisor(k, abstract_plant(g, extended), extended)
    extended_loop = closed_loop(extended_supervisor, g)
    joint = nonconflicting([extended_supervisor, g])
    equal = equivalent(loop, extended_loop)
    witness = None if equal else difference_witness(loop, extended_loop)
    logger.info("Extended observation: closed loops %s", "agree" if equal else "differ")
    return ExtendedObservationResult(
        certified=equal and joint,
        supervisor=supervisor,
        closed_loop=loop,
        extended_closed_loop=extended_loop,
        nonconflicting=joint,
        witness=witness,
    )
