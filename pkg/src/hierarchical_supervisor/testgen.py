"""Test-instance generators and definition-level oracles.

The `brute_*` functions quantify literally over enumerated strings; the OC and
MOC oracles group strings whose Q- and P-images coincide. They are slow and
only complete on finite languages, which is what makes them useful as
oracles for the automaton-based checkers and synthesis procedures.

Random generation uses `random.Random(seed)` (Mersenne Twister MT19937). A
suite that needs many instances derives the i-th seed as
`seed * SEED_STRIDE + i`, so any failure replays from its printed seed.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from hierarchical_supervisor.automaton import Alphabet, Automaton, Word
from hierarchical_supervisor.des_format import write_des
from hierarchical_supervisor.errors import DuplicateName, UnmarkedState
from hierarchical_supervisor.hierarchical import abstract_plant
from hierarchical_supervisor.language import (
    complement,
    enumerate_generated,
    enumerate_language,
    from_strings,
    longest_path_length,
    shortest_accepted,
    trim,
    word_key,
)
from hierarchical_supervisor.params import ProfileName, RandomProfile
from hierarchical_supervisor.projection import ProjectionContext, project_string
from hierarchical_supervisor.verdict import ProofKind, Verdict

logger = logging.getLogger(__name__)

SEED_STRIDE = 1_000_003
SUBSET_LIMIT = 14
GADGET_OBSERVED = "@"
GADGET_HIGH = "#"
_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def derived_seed(seed: int, index: int) -> int:
    return seed * SEED_STRIDE + index


def _require_all_marked(a: Automaton) -> None:
    for state in a.states:
        if state not in a.marked:
            raise UnmarkedState(state)


# --- hardness gadget --------------------------------------------------------


def pspace_gadget(a: Automaton) -> tuple[Automaton, ProjectionContext]:
    """Build the MOC instance B whose language is MOC iff the NFA `a` is universal.

    Every transition p -σ-> q of `a` is split through a fresh event and a middle
    state, giving A'. B then marks @#L(A') ∪ @(Σ'Σ)* ∪ #(Σ'Σ)* ∪ L(A'), where Σ'
    are the fresh events. The abstraction keeps Σ ∪ {#} and the observation
    keeps Σ ∪ {@}. An NFA without transitions still gets one loop event per base
    event, so the (Σ'Σ)* branches are never trivial.

    Raises:
        UnmarkedState: `a` has an unmarked state.
        DuplicateName: `a` already uses `@`, `#` or a generated event name.
    """
    _require_all_marked(a)
    base = a.alphabet.events
    index = a.state_index
    split = [(p, f"x{index[p]}_{e}_{index[q]}", e, q) for p, e, q in a.sorted_transitions]
    fresh = tuple(x for _, x, _, _ in split) or tuple(f"x_{e}" for e in base)
    for reserved in (GADGET_OBSERVED, GADGET_HIGH, *fresh):
        if reserved in a.alphabet:
            raise DuplicateName(reserved, kind="event")
    events = (*base, *fresh, GADGET_OBSERVED, GADGET_HIGH)
    alphabet = Alphabet(
        events,
        controllable=frozenset(events),
        observable=frozenset((*base, GADGET_OBSERVED)),
        highlevel=frozenset((*base, GADGET_HIGH)),
    )

    def copy(p: str) -> str:
        return f"A{index[p]}"

    middles = [f"X_{x}" for _, x, _, _ in split]
    states = ["n1", "n2", "n3", "m1", "h0", "h1", *(copy(p) for p in a.states), *middles]
    # `#` may follow `@` only directly; the @(Σ'Σ)* loop runs through n3.
    transitions = [("n1", GADGET_OBSERVED, "n2"), ("n1", GADGET_HIGH, "h0"), ("n2", GADGET_HIGH, copy(a.initial))]
    for x in fresh:
        transitions += [("n2", x, "m1"), ("n3", x, "m1"), ("h0", x, "h1")]
    for e in base:
        transitions += [("m1", e, "n3"), ("h1", e, "h0")]
    for p, x, e, q in split:
        transitions += [(copy(p), x, f"X_{x}"), (f"X_{x}", e, copy(q))]
        if p == a.initial:
            transitions.append(("n1", x, f"X_{x}"))
    marked = ["n1", "n2", "n3", "h0", *(copy(p) for p in a.states), *middles]
    b = Automaton.build(states, alphabet, transitions, "n1", marked)
    ctx = ProjectionContext(sigma=alphabet, sigma_o=alphabet.observable, sigma_hi=alphabet.highlevel)
    logger.debug("gadget: %d states, %d transitions from an NFA with %d", b.num_states, b.num_transitions, a.num_transitions)
    return b, ctx


def shortest_rejected(a: Automaton) -> Word | None:
    """Length-lex least string over the alphabet of `a` outside L_m(a), or None."""
    return shortest_accepted(complement(a))


def nfa_universal(a: Automaton) -> bool:
    """Decide L(a) = Σ* for an NFA whose states are all marked.

    Raises:
        UnmarkedState: `a` has an unmarked state.
    """
    _require_all_marked(a)
    return shortest_rejected(a) is None


def random_nfa(seed: int, *, max_states: int = 4, max_events: int = 2) -> Automaton:
    """Random NFA with every state marked, for the hardness-gadget suites."""
    rng = random.Random(seed)
    events = tuple(_LETTERS[: rng.randint(1, max_events)])
    states = [f"p{i}" for i in range(rng.randint(1, max_states))]
    transitions = []
    for p in states:
        for e in events:
            for q in rng.sample(states, rng.choice((0, 1, 1, 2)) if len(states) > 1 else rng.randint(0, 1)):
                transitions.append((p, e, q))
    return Automaton.build(states, Alphabet(events), transitions, "p0", states)


# --- definition-level oracles -----------------------------------------------


def _complete(l: Automaton, depth: int) -> bool:  # noqa: E741
    longest = longest_path_length(l)
    return longest is not None and longest <= depth


def _pair_key(pair: tuple[Word, Word]) -> tuple[int, Word, Word]:
    return (len(pair[0]) + len(pair[1]), pair[0], pair[1])


def _brute_verdict(
    name: str,
    l: Automaton,  # noqa: E741
    depth: int,
    failure: tuple[Word, Word] | None,
    judged: int,
    *,
    event: str | None = None,
) -> Verdict:
    if failure is not None:
        return Verdict.violated(name, failure, event=event, bound=depth, candidates=judged)
    if _complete(l, depth):
        return Verdict.holds(name, ProofKind.EXHAUSTIVE_FINITE, bound=depth, candidates=judged)
    return Verdict.bounded_pass(name, depth, candidates=judged)


def _samples(l: Automaton, depth: int, witness_depth: int | None) -> tuple[tuple[Word, ...], tuple[Word, ...]]:  # noqa: E741
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    wider = max(depth, witness_depth if witness_depth is not None else depth)
    witnesses = enumerate_generated(l, wider).strings
    return tuple(s for s in witnesses if len(s) <= depth), witnesses


def _observation_classes(l: Automaton, ctx: ProjectionContext, depth: int) -> dict[tuple[Word, Word], Word]:  # noqa: E741
    """Map each (Q(s), P(s)) over s ∈ L with |s| <= depth to its length-lex least s.

    Strings reaching the same state with the same two images have the same
    continuations, so only the least of them is extended.
    """
    events = sorted(l.alphabet.events)
    least: dict[tuple[Word, Word], Word] = {((), ()): ()}
    seen = {(l.initial, (), ())}
    frontier: list[tuple[Word, str, Word, Word]] = [((), l.initial, (), ())]
    for _ in range(depth):
        nxt: list[tuple[Word, str, Word, Word]] = []
        for word, state, high, observed in frontier:
            for e in events:
                q = high + (e,) if e in ctx.sigma_hi else high
                p = observed + (e,) if e in ctx.sigma_o else observed
                for target in l.successors(state, e):
                    if (target, q, p) in seen:
                        continue
                    seen.add((target, q, p))
                    nxt.append((word + (e,), target, q, p))
                    least.setdefault((q, p), word + (e,))
        frontier = nxt
    return least


def _class_samples(
    l: Automaton, ctx: ProjectionContext, depth: int, witness_depth: int | None  # noqa: E741
) -> tuple[dict[tuple[Word, Word], Word], dict[tuple[Word, Word], Word]]:
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    wider = max(depth, witness_depth if witness_depth is not None else depth)
    witnesses = _observation_classes(l, ctx, wider)
    return {key: s for key, s in witnesses.items() if len(s) <= depth}, witnesses


def brute_oc(l: Automaton, ctx: ProjectionContext, depth: int, *, witness_depth: int | None = None) -> Verdict:  # noqa: E741
    """OC by quantifying over every t, t' ∈ Q(L) coming from strings of length <= depth.

    Witnesses s, s' are searched among strings of length <= `witness_depth`
    (default `depth`).
    """
    within, witnesses = _class_samples(l, ctx, depth, witness_depth)
    observations: dict[Word, set[Word]] = {}
    for t, observed in witnesses:
        observations.setdefault(t, set()).add(observed)
    high = sorted({t for t, _ in within}, key=word_key)
    candidates = sorted(
        (
            (t, t2)
            for t in high
            for t2 in high
            if project_string(ctx, "P_hi", t) == project_string(ctx, "P_hi", t2)
        ),
        key=_pair_key,
    )
    for judged, (t, t2) in enumerate(candidates, start=1):
        if not observations[t] & observations[t2]:
            return _brute_verdict("OC", l, depth, (t, t2), judged)
    return _brute_verdict("OC", l, depth, None, len(candidates))


def brute_moc(l: Automaton, ctx: ProjectionContext, depth: int, *, witness_depth: int | None = None) -> Verdict:  # noqa: E741
    """MOC by quantifying over every s ∈ L and t' ∈ Q(L) from strings of length <= depth.

    Strings with equal Q- and P-images are judged alike, so each such class is
    represented by its length-lex least member.
    """
    within, witnesses = _class_samples(l, ctx, depth, witness_depth)
    by_shared: dict[Word, list[Word]] = {}
    for t in sorted({t for t, _ in within}, key=word_key):
        by_shared.setdefault(project_string(ctx, "P_hi", t), []).append(t)
    candidates = sorted(
        (
            (s, t2, observed)
            for (t, observed), s in within.items()
            for t2 in by_shared[project_string(ctx, "P_hi", t)]
        ),
        key=lambda c: _pair_key((c[0], c[1])),
    )
    for judged, (s, t2, observed) in enumerate(candidates, start=1):
        if (t2, observed) not in witnesses:
            return _brute_verdict("MOC", l, depth, (s, t2), judged)
    return _brute_verdict("MOC", l, depth, None, len(candidates))


def brute_loc(l: Automaton, ctx: ProjectionContext, depth: int, *, witness_depth: int | None = None) -> Verdict:  # noqa: E741
    """LOC by quantifying over every s, s' ∈ L of length <= depth and controllable high-level e."""
    critical = sorted(ctx.sigma_hi & ctx.sigma_c)
    if not critical:
        return Verdict.holds("LOC", ProofKind.EXHAUSTIVE_FINITE, bound=0)
    strings, witnesses = _samples(l, depth, witness_depth)
    high = {project_string(ctx, "Q", s) for s in witnesses}
    # (s, e) -> observations P(u) of low tails u with s u e ∈ L.
    tails: dict[tuple[Word, str], set[Word]] = {}
    for r in witnesses:
        if not r or r[-1] not in critical:
            continue
        body = r[:-1]
        cut = len(body)
        while True:
            tails.setdefault((body[:cut], r[-1]), set()).add(project_string(ctx, "P", body[cut:]))
            if cut == 0 or body[cut - 1] in ctx.sigma_hi:
                break
            cut -= 1
    by_observation: dict[Word, list[Word]] = {}
    for s in strings:
        by_observation.setdefault(project_string(ctx, "P", s), []).append(s)
    pairs = sorted(((s, s2) for group in by_observation.values() for s in group for s2 in group), key=_pair_key)
    judged = 0
    for s, s2 in pairs:
        for e in critical:
            if project_string(ctx, "Q", s) + (e,) not in high or project_string(ctx, "Q", s2) + (e,) not in high:
                continue
            judged += 1
            if not tails.get((s, e), set()) & tails.get((s2, e), set()):
                return _brute_verdict("LOC", l, depth, (s, s2), judged, event=e)
    return _brute_verdict("LOC", l, depth, None, judged)


def _prefixes(words: Sequence[Word]) -> set[Word]:
    return {w[:i] for w in words for i in range(len(w) + 1)}


def brute_supremal(
    k: Automaton,
    g: Automaton,
    ctx: ProjectionContext,
    depth: int,
    *,
    normal: bool = True,
    controllable: bool = False,
    prefix_closed: bool = False,
) -> frozenset[Word]:
    """Union of every S ⊆ L_m(k) whose closure passes the requested definition-level tests.

    Normality of closure(S) is taken with respect to L(g) and P, controllability
    with respect to L(g) and Σ_uc. With `prefix_closed`, only prefix-closed S
    are considered.

    Raises:
        ValueError: L(g) has strings longer than `depth`, or L_m(k) has more
            than `SUBSET_LIMIT` strings.
    """
    if not _complete(g, depth):
        raise ValueError(f"L(g) must be finite within depth {depth}")
    pool = enumerate_language(k, depth).strings
    if len(pool) > SUBSET_LIMIT:
        raise ValueError(f"brute-force supremum needs at most {SUBSET_LIMIT} strings, got {len(pool)}")
    generated = set(enumerate_generated(g, depth).strings)
    classes: dict[Word, set[Word]] = {}
    for s in generated:
        classes.setdefault(project_string(ctx, "P", s), set()).add(s)
    uncontrollable = sorted(ctx.sigma_uc)

    def qualifies(subset: list[Word]) -> bool:
        closure = _prefixes(subset)
        if prefix_closed and not closure <= set(subset):
            return False
        if normal and any(not classes.get(project_string(ctx, "P", c), set()) <= closure for c in closure):
            return False
        if controllable:
            for c in closure:
                for u in uncontrollable:
                    if c + (u,) in generated and c + (u,) not in closure:
                        return False
        return True

    union: set[Word] = set()
    for mask in range(1, 1 << len(pool)):
        subset = [w for i, w in enumerate(pool) if mask >> i & 1]
        if qualifies(subset):
            union.update(subset)
    return frozenset(union)


def brute_sup_normal(k: Automaton, l: Automaton, ctx: ProjectionContext, depth: int) -> frozenset[Word]:  # noqa: E741
    """Union of all prefix-closed sublanguages of L_m(k) that are normal with respect to L(l) and P."""
    return brute_supremal(k, l, ctx, depth, normal=True, controllable=False, prefix_closed=True)


# --- worked examples --------------------------------------------------------


def _context(events: str, *, observable: str, highlevel: str) -> ProjectionContext:
    alphabet = Alphabet(tuple(events), controllable=frozenset(events))
    return ProjectionContext(sigma=alphabet, sigma_o=frozenset(observable), sigma_hi=frozenset(highlevel))


def _closed_language(words: Sequence[str], alphabet: Alphabet) -> Automaton:
    return from_strings(_prefixes([tuple(w) for w in words]), alphabet)


def example1_models() -> tuple[Automaton, ProjectionContext]:
    """L = {ε, a, ab, c, cb} with Σ_hi = {a, b}, Σ_o = {b, c}; not OC, witnessed by (ab, b)."""
    ctx = _context("abc", observable="bc", highlevel="ab")
    return _closed_language(["ab", "cb"], ctx.alphabet), ctx


def example2_models() -> tuple[Automaton, ProjectionContext]:
    """L = {ε, a, ab, abc, b} with Σ_hi = {a, c}, Σ_o = {b}; OC although one interleaving of a candidate is unmatched."""
    ctx = _context("abc", observable="b", highlevel="ac")
    return _closed_language(["abc", "b"], ctx.alphabet), ctx


def example3_models() -> tuple[Automaton, Automaton, ProjectionContext]:
    """Plant L = closure{ac, bac, c}, spec K = {ε, b, c}; OC but not MOC."""
    ctx = _context("abc", observable="ac", highlevel="bc")
    plant = _closed_language(["ac", "bac", "c"], ctx.alphabet)
    spec = from_strings([(), ("b",), ("c",)], ctx.high_alphabet)
    return plant, spec, ctx


class RailroadModels(NamedTuple):
    west: Automaton
    east: Automaton
    spec: Automaton
    ctx: ProjectionContext


def _train(side: str, alphabet: Alphabet) -> Automaton:
    arrive, wait, enter, leave = (f"{e}_{side}" for e in "awel")
    return Automaton.build(
        ("0", "1", "2"),
        alphabet.restrict((arrive, wait, enter, leave)),
        (("0", arrive, "1"), ("1", wait, "0"), ("1", enter, "2"), ("2", leave, "0")),
        "0",
        ("0",),
    )


def railroad_models(*, hide_entries: bool = True) -> RailroadModels:
    """Two trains sharing a single-track bridge and a mutual-exclusion specification.

    Each train arrives (a), then waits (w) or enters (e) and later leaves (l);
    every event is controllable, leave events are unobservable and entry events
    are low-level. With `hide_entries` (the default) entry events are
    unobservable as well, which keeps Σ_o ⊆ Σ_hi; without it the composed plant
    violates MOC.

    The specification admits an arrival only while the other train is idle.
    """
    events = tuple(f"{e}_{side}" for side in ("w", "e") for e in "awel")
    entries = {"e_w", "e_e"}
    leaves = {"l_w", "l_e"}
    hidden = leaves | entries if hide_entries else leaves
    alphabet = Alphabet(
        events,
        controllable=frozenset(events),
        observable=frozenset(events) - hidden,
        highlevel=frozenset(events) - entries,
    )
    ctx = ProjectionContext(sigma=alphabet, sigma_o=alphabet.observable, sigma_hi=alphabet.highlevel)
    spec = Automaton.build(
        ("idle", "west", "east"),
        ctx.high_alphabet,
        (
            ("idle", "a_w", "west"),
            ("idle", "a_e", "east"),
            ("west", "w_w", "idle"),
            ("west", "l_w", "idle"),
            ("east", "w_e", "idle"),
            ("east", "l_e", "idle"),
        ),
        "idle",
        ("idle",),
    )
    return RailroadModels(_train("w", alphabet), _train("e", alphabet), spec, ctx)


# --- random instances -------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    """Reproducible plant/spec/context triple."""

    plant: Automaton
    spec: Automaton
    ctx: ProjectionContext
    seed: int
    profile: ProfileName


def _subset(rng: random.Random, events: Sequence[str], p: float) -> frozenset[str]:
    return frozenset(e for e in events if rng.random() < p)


def _random_roles(
    rng: random.Random, events: tuple[str, ...], profile: ProfileName
) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    controllable = _subset(rng, events, 0.6)
    highlevel = _subset(rng, events, 0.6) or frozenset({rng.choice(events)})
    if profile is ProfileName.MOC_BY_CONSTRUCTION:
        if rng.random() < 0.5:
            observable = _subset(rng, sorted(highlevel), 0.6)
        else:
            observable = highlevel | _subset(rng, events, 0.5)
    else:
        observable = _subset(rng, events, 0.5)
    return controllable, observable, highlevel


def _random_cyclic(rng: random.Random, alphabet: Alphabet, limits: RandomProfile, all_marked: bool) -> Automaton:
    states = [f"g{i}" for i in range(rng.randint(1, limits.max_states))]
    transitions = [(p, e, rng.choice(states)) for p in states for e in alphabet.events if rng.random() < 0.45]
    marked = states if all_marked else [s for s in states if rng.random() < 0.4]
    g = trim(Automaton.build(states, alphabet, transitions, states[0], marked))
    if not g.marked:
        g = trim(Automaton.build(states, alphabet, transitions, states[0], [*marked, states[0]]))
    return g


def _random_acyclic(rng: random.Random, alphabet: Alphabet, limits: RandomProfile, all_marked: bool) -> Automaton:
    levels: list[list[str]] = [["g0"]]
    count = 1
    for _ in range(rng.randint(1, limits.max_depth)):
        width = min(rng.randint(1, 2), limits.max_states - count)
        if width <= 0:
            break
        levels.append([f"g{count + i}" for i in range(width)])
        count += width
    transitions = []
    for depth, level in enumerate(levels[:-1]):
        later = [s for lvl in levels[depth + 1 :] for s in lvl]
        for p in level:
            for e in alphabet.events:
                if rng.random() < 0.5:
                    transitions.append((p, e, rng.choice(levels[depth + 1] if rng.random() < 0.7 else later)))
    states = [s for lvl in levels for s in lvl]
    sources = {t[0] for t in transitions}
    marked = [s for s in states if all_marked or s not in sources or rng.random() < 0.3]
    return trim(Automaton.build(states, alphabet, transitions, "g0", marked))


def _random_spec(rng: random.Random, g: Automaton, ctx: ProjectionContext) -> Automaton:
    g_hi = abstract_plant(g, ctx)
    kept = [t for t in g_hi.sorted_transitions if rng.random() < 0.75]
    return trim(Automaton.build(g_hi.states, g_hi.alphabet, kept, g_hi.initial, g_hi.marked))


def random_instance(
    seed: int, profile: RandomProfile | ProfileName | str = ProfileName.UNCONSTRAINED, *, prefix_closed: bool = False
) -> Instance:
    """Pseudo-random nonblocking plant, specification K ⊆ Q(L_m) and projection context.

    Profiles: `moc-by-construction` draws Σ_o ⊆ Σ_hi or Σ_hi ⊆ Σ_o,
    `unconstrained` draws the event roles independently, `acyclic-small` also
    makes the plant acyclic (finite language). K is a random sub-automaton of
    the abstraction G_hi keeping its marking. With `prefix_closed` the plant
    and K mark every state.
    """
    limits = profile if isinstance(profile, RandomProfile) else RandomProfile.named(profile)
    rng = random.Random(seed)
    events = tuple(_LETTERS[: rng.randint(2, max(2, limits.max_events))])
    controllable, observable, highlevel = _random_roles(rng, events, limits.name)
    alphabet = Alphabet(events, controllable=controllable, observable=observable, highlevel=highlevel)
    ctx = ProjectionContext(sigma=alphabet, sigma_o=observable, sigma_hi=highlevel)
    all_marked = prefix_closed or rng.random() < 0.5
    if limits.name is ProfileName.ACYCLIC_SMALL:
        plant = _random_acyclic(rng, alphabet, limits, all_marked)
    else:
        plant = _random_cyclic(rng, alphabet, limits, all_marked)
    return Instance(plant=plant, spec=_random_spec(rng, plant, ctx), ctx=ctx, seed=seed, profile=limits.name)


def random_instances(
    seed: int, count: int, profile: RandomProfile | ProfileName | str = ProfileName.UNCONSTRAINED, **kwargs: bool
) -> Iterator[Instance]:
    """`count` instances with derived seeds."""
    for index in range(count):
        yield random_instance(derived_seed(seed, index), profile, **kwargs)


def random_sublanguage(a: Automaton, seed: int, *, depth: int, max_strings: int = 8) -> Automaton:
    """Automaton marking a random subset of at most `max_strings` strings of L_m(a) up to `depth`."""
    rng = random.Random(seed)
    pool = list(enumerate_language(a, depth).strings)
    chosen = rng.sample(pool, min(len(pool), rng.randint(0, max_strings)))
    return from_strings(chosen, a.alphabet)


def write_instance(instance: Instance, directory: str | Path) -> Path:
    """Write `plant.des`, `spec.des` and a `manifest.toml` naming profile and seed; return the manifest path."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_des(instance.plant, out / "plant.des")
    write_des(instance.spec, out / "spec.des")
    manifest = out / "manifest.toml"
    manifest.write_text(
        "\n".join(
            [
                "[instance]",
                f"seed = {instance.seed}",
                f'profile = "{instance.profile}"',
                "",
                "[files]",
                'plant = "plant.des"',
                'spec = "spec.des"',
                "",
            ]
        ),
        encoding="utf-8",
    )
    return manifest
