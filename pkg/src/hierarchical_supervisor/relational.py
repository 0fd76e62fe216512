"""Relational languages and the observation-consistency checkers.

A relational language is a set of string pairs (w, w') that agree on a
synchronization alphabet Σ'. It is accepted by a `PairAutomaton` whose events
are pairs `(a, a)` for a ∈ Σ', `(a, ε)` and `(ε, b)` for the private events.

The OC/MOC/LOC checkers only use pair automata to *generate candidates*. Each
candidate is judged by a per-candidate emptiness search over the plant, which
is decidable for a fixed candidate. Comparing pair-strings of two relational
languages directly is unsound, because the same pair of strings can be
interleaved differently on the two sides.

Verdicts:
- `Holds(SufficientCondition)` when Σ_o ⊆ Σ_hi or Σ_hi ⊆ Σ_o (OC and MOC);
- `Holds(ExhaustiveFinite)` when the candidate pair language is finite and was
  fully enumerated;
- `Violated` with the least failing candidate under (|w| + |w'|, w, w');
- `BoundedPass(bound)` otherwise.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from collections.abc import Callable, Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, TypeVar

from hierarchical_supervisor.automaton import Alphabet, Automaton, Word
from hierarchical_supervisor.errors import NotPrefixClosed, SyncSetNotShared
from hierarchical_supervisor.language import (
    build_reachable,
    closed,
    determinize,
    included,
    longest_path_length,
    prefix_closure,
    relabel,
    trim,
)
from hierarchical_supervisor.projection import ProjectionContext, project, project_string
from hierarchical_supervisor.verdict import ProofKind, Verdict

logger = logging.getLogger(__name__)

EPSILON = "-"
CHUNK_PER_WORKER = 64

Pair = tuple[Word, Word]
C = TypeVar("C")
LanguageMode = Literal["generated", "marked"]


@dataclass(frozen=True)
class PairEvent:
    """Event of a pair automaton; `None` stands for the empty string ε."""

    left: str | None
    right: str | None

    def __post_init__(self) -> None:
        if self.left is None and self.right is None:
            raise ValueError("PairEvent needs at least one non-empty component")
        if self.left is not None and self.right is not None and self.left != self.right:
            raise ValueError(f"Synchronized PairEvent must repeat one event, got ({self.left}, {self.right})")

    @property
    def name(self) -> str:
        return f"{self.left or EPSILON}|{self.right or EPSILON}"

    @property
    def is_sync(self) -> bool:
        return self.left is not None and self.right is not None

    @classmethod
    def parse(cls, name: str) -> PairEvent:
        left, sep, right = name.partition("|")
        if not sep:
            raise ValueError(f"Not a pair event name: {name!r}")
        return cls(None if left == EPSILON else left, None if right == EPSILON else right)


@dataclass(frozen=True)
class PairAutomaton:
    """Automaton over pair events plus the component alphabets and Σ'."""

    automaton: Automaton
    left: frozenset[str]
    right: frozenset[str]
    syncset: frozenset[str]

    @cached_property
    def pairs(self) -> dict[str, PairEvent]:
        return {name: PairEvent.parse(name) for name in self.automaton.alphabet.events}

    def accepts(self, left: Sequence[str], right: Sequence[str], *, interleaving: Sequence[PairEvent]) -> bool:
        """True iff the given pair-string (which must spell `left`/`right`) is accepted."""
        if tuple(e.left for e in interleaving if e.left) != tuple(left):
            raise ValueError("interleaving does not spell the left component")
        if tuple(e.right for e in interleaving if e.right) != tuple(right):
            raise ValueError("interleaving does not spell the right component")
        states = frozenset({self.automaton.initial})
        for event in interleaving:
            states = frozenset(t for s in states for t in self.automaton.successors(s, event.name))
            if not states:
                return False
        return bool(states & self.automaton.marked)


def _pair_alphabet(events: Iterable[PairEvent]) -> Alphabet:
    names: list[str] = []
    for event in events:
        if event.name not in names:
            names.append(event.name)
    return Alphabet(events=tuple(names))


def sync_pair_product(a: Automaton, b: Automaton, syncset: Iterable[str]) -> PairAutomaton:
    """Pair automaton accepting every (w, w') ∈ L(a) × L(b) that agrees on `syncset`.

    A pair-string is marked when both components end in marked states.

    Raises:
        SyncSetNotShared: `syncset` is not contained in both alphabets.
    """
    sync = frozenset(syncset)
    missing = sync - (a.alphabet.event_set & b.alphabet.event_set)
    if missing:
        raise SyncSetNotShared(tuple(sorted(missing)))
    events = (
        [PairEvent(e, e) for e in a.alphabet.events if e in sync]
        + [PairEvent(e, None) for e in a.alphabet.events if e not in sync]
        + [PairEvent(None, e) for e in b.alphabet.events if e not in sync]
    )
    alphabet = _pair_alphabet(events)

    def successors(node: tuple[str, str]) -> Iterable[tuple[str, tuple[str, str]]]:
        p, q = node
        for event in events:
            lefts = a.successors(p, event.left) if event.left is not None else (p,)
            rights = b.successors(q, event.right) if event.right is not None else (q,)
            for p2 in lefts:
                for q2 in rights:
                    yield event.name, (p2, q2)

    result, names = build_reachable(
        alphabet, (a.initial, b.initial), successors, lambda pq: pq[0] in a.marked and pq[1] in b.marked
    )
    logger.debug("sync_pair_product: %d pair states", len(names))
    return PairAutomaton(
        automaton=result, left=a.alphabet.event_set, right=b.alphabet.event_set, syncset=sync
    )


def _map_pairs(pa: PairAutomaton, keep_left: frozenset[str], keep_right: frozenset[str]) -> PairAutomaton:
    mapping: dict[str, str | None] = {}
    images: list[PairEvent] = []
    for name, event in pa.pairs.items():
        left = event.left if event.left in keep_left else None
        right = event.right if event.right in keep_right else None
        if left is None and right is None:
            mapping[name] = None
            continue
        image = PairEvent(left, right)
        mapping[name] = image.name
        images.append(image)
    automaton = relabel(pa.automaton, mapping, _pair_alphabet(images))
    return PairAutomaton(
        automaton=automaton,
        left=pa.left & keep_left,
        right=pa.right & keep_right,
        syncset=pa.syncset & keep_left & keep_right,
    )


def map_pairs_Q(pa: PairAutomaton, ctx: ProjectionContext) -> PairAutomaton:  # noqa: N802
    """Relabel every pair event componentwise by Q; pairs mapped to (ε, ε) are erased."""
    return _map_pairs(pa, ctx.sigma_hi, ctx.sigma_hi)


def map_pairs_Q2(pa: PairAutomaton, ctx: ProjectionContext) -> PairAutomaton:  # noqa: N802
    """Relabel every pair event (a, b) to (a, Q(b))."""
    return _map_pairs(pa, pa.left, ctx.sigma_hi)


def iter_pair_language(pa: PairAutomaton, bound: int) -> Iterator[Pair]:
    """Marked component pairs (w, w') with |w| + |w'| <= bound, lazily.

    Each pair is produced once, through its canonical interleaving: between two
    synchronized events all left-only events precede all right-only events.
    This reaches every pair of a `sync_pair_product`, whose private moves
    commute. Pairs come in (|w| + |w'|, w, w') order; longer pairs are only
    expanded once the shorter ones have been consumed.
    """
    if bound < 0:
        raise ValueError(f"bound must be >= 0, got {bound}")
    return _walk_pairs(determinize(pa.automaton, complete=False), bound)


def pair_language(pa: PairAutomaton, bound: int) -> list[Pair]:
    """All pairs of `iter_pair_language`, as a list."""
    return list(iter_pair_language(pa, bound))


def _walk_pairs(d: Automaton, bound: int) -> Iterator[Pair]:
    pairs = {name: PairEvent.parse(name) for name in d.alphabet.events}
    names = sorted(pairs)
    buckets: dict[int, list[tuple[str, bool, Word, Word]]] = {0: [(d.initial, False, (), ())]}
    for length in range(bound + 1):
        found: list[Pair] = []
        for state, right_started, left, right in buckets.pop(length, []):
            if state in d.marked:
                found.append((left, right))
            for name in names:
                event = pairs[name]
                if right_started and event.right is None:
                    continue
                target = d.step(state, name)
                if target is None:
                    continue
                cost = 2 if event.is_sync else 1
                if length + cost > bound:
                    continue
                buckets.setdefault(length + cost, []).append(
                    (
                        target,
                        event.left is None,
                        left + ((event.left,) if event.left is not None else ()),
                        right + ((event.right,) if event.right is not None else ()),
                    )
                )
        found.sort()
        yield from found


# --- per-candidate witnesses ------------------------------------------------


def _plant_dfa(l: Automaton) -> Automaton:  # noqa: E741
    return determinize(closed(l), complete=False)


def _unwind_pair(parent: dict[object, tuple[object, str, str] | None], node: object) -> Pair:
    left: list[str] = []
    right: list[str] = []
    link = parent[node]
    while link is not None:
        node, side, event = link
        if side in ("L", "J"):
            left.append(event)
        if side in ("R", "J"):
            right.append(event)
        link = parent[node]
    return tuple(reversed(left)), tuple(reversed(right))


def _oc_witness(d: Automaton, ctx: ProjectionContext, t: Word, t2: Word) -> Pair | None:
    events = sorted(d.alphabet.events)

    def advance(pos: int, target: Word, event: str) -> int | None:
        if event not in ctx.sigma_hi:
            return pos
        if pos < len(target) and target[pos] == event:
            return pos + 1
        return None

    start = (d.initial, 0, d.initial, 0)
    parent: dict[object, tuple[object, str, str] | None] = {start: None}
    queue: deque[tuple[str, int, str, int]] = deque([start])
    while queue:
        node = queue.popleft()
        x, i, x2, j = node
        if i == len(t) and j == len(t2):
            return _unwind_pair(parent, node)
        for event in events:
            a = d.step(x, event)
            b = d.step(x2, event)
            if event in ctx.sigma_o:
                if a is None or b is None:
                    continue
                i2, j2 = advance(i, t, event), advance(j, t2, event)
                if i2 is None or j2 is None:
                    continue
                moves = [((a, i2, b, j2), "J")]
            else:
                moves = []
                if a is not None and (i2 := advance(i, t, event)) is not None:
                    moves.append(((a, i2, x2, j), "L"))
                if b is not None and (j2 := advance(j, t2, event)) is not None:
                    moves.append(((x, i, b, j2), "R"))
            for nxt, side in moves:
                if nxt not in parent:
                    parent[nxt] = (node, side, event)
                    queue.append(nxt)
    return None


def oc_pair_witness(l: Automaton, ctx: ProjectionContext, t: Sequence[str], t2: Sequence[str]) -> Pair | None:  # noqa: E741
    """Find s, s' ∈ L(l) with Q(s) = t, Q(s') = t' and P(s) = P(s'), or return None."""
    return _oc_witness(_plant_dfa(l), ctx, tuple(t), tuple(t2))


def _moc_witness(d: Automaton, ctx: ProjectionContext, observation: Word, t2: Word) -> Word | None:
    events = sorted(d.alphabet.events)
    start = (d.initial, 0, 0)
    parent: dict[tuple[str, int, int], tuple[tuple[str, int, int], str] | None] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        x, j, k = node
        if j == len(t2) and k == len(observation):
            word: list[str] = []
            link = parent[node]
            while link is not None:
                node, event = link
                word.append(event)
                link = parent[node]
            return tuple(reversed(word))
        for event in events:
            target = d.step(x, event)
            if target is None:
                continue
            j2, k2 = j, k
            if event in ctx.sigma_hi:
                if j >= len(t2) or t2[j] != event:
                    continue
                j2 = j + 1
            if event in ctx.sigma_o:
                if k >= len(observation) or observation[k] != event:
                    continue
                k2 = k + 1
            nxt = (target, j2, k2)
            if nxt not in parent:
                parent[nxt] = (node, event)
                queue.append(nxt)
    return None


def moc_pair_witness(l: Automaton, ctx: ProjectionContext, s: Sequence[str], t2: Sequence[str]) -> Word | None:  # noqa: E741
    """Find s' ∈ L(l) with Q(s') = t' and P(s') = P(s), or return None."""
    return _moc_witness(_plant_dfa(l), ctx, project_string(ctx, "P", s), tuple(t2))


def _state_after(d: Automaton, word: Sequence[str]) -> str | None:
    state: str | None = d.initial
    for event in word:
        if state is None:
            return None
        state = d.step(state, event)
    return state


def _loc_witness(d: Automaton, ctx: ProjectionContext, s: Word, s2: Word, e: str) -> Pair | None:
    start_left, start_right = _state_after(d, s), _state_after(d, s2)
    if start_left is None or start_right is None:
        return None
    low = sorted(ctx.low_events)
    start = (start_left, start_right)
    parent: dict[object, tuple[object, str, str] | None] = {start: None}
    queue: deque[tuple[str, str]] = deque([start])
    while queue:
        node = queue.popleft()
        x, x2 = node
        if d.step(x, e) is not None and d.step(x2, e) is not None:
            return _unwind_pair(parent, node)
        for event in low:
            a, b = d.step(x, event), d.step(x2, event)
            if event in ctx.sigma_o:
                moves = [((a, b), "J")] if a is not None and b is not None else []
            else:
                moves = []
                if a is not None:
                    moves.append(((a, x2), "L"))
                if b is not None:
                    moves.append(((x, b), "R"))
            for nxt, side in moves:
                if nxt not in parent:
                    parent[nxt] = (node, side, event)
                    queue.append(nxt)
    return None


def loc_pair_witness(
    l: Automaton, ctx: ProjectionContext, s: Sequence[str], s2: Sequence[str], e: str  # noqa: E741
) -> Pair | None:
    """Find low-level u, u' with P(u) = P(u') such that s u e and s' u' e are in L(l), or return None."""
    return _loc_witness(_plant_dfa(l), ctx, tuple(s), tuple(s2), e)


# --- checkers ---------------------------------------------------------------


def sufficient_moc(ctx: ProjectionContext) -> bool:
    """True iff Σ_o ⊆ Σ_hi or Σ_hi ⊆ Σ_o, which makes every L(G) OC and MOC."""
    return ctx.sigma_o <= ctx.sigma_hi or ctx.sigma_hi <= ctx.sigma_o


def _language(l: Automaton, mode: LanguageMode, name: str) -> Automaton:  # noqa: E741
    """The automaton whose generated language is checked."""
    if mode == "generated":
        return l
    result = included(prefix_closure(l), l)
    if not result:
        raise NotPrefixClosed(result.counterexample[0], operand=f"{name} language")
    return trim(l)


def _search_bound(pa: PairAutomaton, bound: int | None) -> tuple[int, bool]:
    """Bound to enumerate to and whether that enumeration is exhaustive."""
    longest = longest_path_length(pa.automaton)
    if longest is not None:
        exhaustive = 2 * longest
        return (exhaustive, True) if bound is None or bound >= exhaustive else (bound, False)
    if bound is None:
        bound = 2 * pa.automaton.num_states
    return bound, False


def _first_failure(
    candidates: Iterable[C], judge: Callable[[C], bool], workers: int
) -> tuple[C | None, int]:
    """First candidate `judge` rejects (in candidate order) and the number judged.

    Candidates are consumed lazily; with several workers they are judged in
    chunks and the search stops after the first chunk holding a failure.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    judged = 0
    if workers == 1:
        for candidate in candidates:
            judged += 1
            if not judge(candidate):
                return candidate, judged
        return None, judged
    stream = iter(candidates)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while chunk := list(itertools.islice(stream, CHUNK_PER_WORKER * workers)):
            judged += len(chunk)
            for candidate, ok in zip(chunk, pool.map(judge, chunk), strict=True):
                if not ok:
                    return candidate, judged
    return None, judged


def _verdict(
    name: str,
    failure: tuple[Word, ...] | None,
    *,
    event: str | None,
    bound: int,
    exhaustive: bool,
    judged: int,
) -> Verdict:
    if failure is not None:
        verdict = Verdict.violated(name, failure, event=event, bound=bound, candidates=judged)
    elif exhaustive:
        verdict = Verdict.holds(name, ProofKind.EXHAUSTIVE_FINITE, bound=bound, candidates=judged)
    else:
        verdict = Verdict.bounded_pass(name, bound, candidates=judged)
    logger.debug("%s: %s after %d candidates", name, verdict.kind, judged)
    return verdict


def check_oc(
    l: Automaton,  # noqa: E741
    ctx: ProjectionContext,
    *,
    bound: int | None = None,
    use_sufficient_condition: bool = True,
    workers: int = 1,
    language: LanguageMode = "generated",
) -> Verdict:
    """Check observation consistency of L(l) with respect to P, Q and P_hi.

    Candidates (t, t') come from Q(L) ∥_{Σ_hi ∩ Σ_o} Q(L); each is judged by
    `oc_pair_witness`.
    """
    if use_sufficient_condition and sufficient_moc(ctx):
        return Verdict.holds("OC", ProofKind.SUFFICIENT_CONDITION)
    plant = _language(l, language, "OC")
    d = _plant_dfa(plant)
    high = closed(project(d, ctx.sigma_hi, alphabet=ctx.high_alphabet))
    pa = sync_pair_product(high, high, ctx.shared)
    limit, exhaustive = _search_bound(pa, bound)
    candidates = iter_pair_language(pa, limit)
    failure, judged = _first_failure(candidates, lambda pair: _oc_witness(d, ctx, *pair) is not None, workers)
    return _verdict("OC", failure, event=None, bound=limit, exhaustive=exhaustive, judged=judged)


def check_moc(
    l: Automaton,  # noqa: E741
    ctx: ProjectionContext,
    *,
    bound: int | None = None,
    use_sufficient_condition: bool = True,
    workers: int = 1,
    language: LanguageMode = "generated",
) -> Verdict:
    """Check modified observation consistency of L(l).

    Candidates (s, t') come from L ∥_{Σ_hi ∩ Σ_o} Q(L); each is judged by
    `moc_pair_witness`.
    """
    if use_sufficient_condition and sufficient_moc(ctx):
        return Verdict.holds("MOC", ProofKind.SUFFICIENT_CONDITION)
    plant = _language(l, language, "MOC")
    d = _plant_dfa(plant)
    low = closed(d)
    high = closed(project(d, ctx.sigma_hi, alphabet=ctx.high_alphabet))
    pa = sync_pair_product(low, high, ctx.shared)
    limit, exhaustive = _search_bound(pa, bound)
    candidates = iter_pair_language(pa, limit)

    def judge(pair: Pair) -> bool:
        s, t2 = pair
        return _moc_witness(d, ctx, project_string(ctx, "P", s), t2) is not None

    failure, judged = _first_failure(candidates, judge, workers)
    return _verdict("MOC", failure, event=None, bound=limit, exhaustive=exhaustive, judged=judged)


def check_loc(
    l: Automaton,  # noqa: E741
    ctx: ProjectionContext,
    *,
    bound: int | None = None,
    workers: int = 1,
    language: LanguageMode = "generated",
) -> Verdict:
    """Check local observation consistency of L(l) with respect to Q, P and Σ_c.

    Candidates (s, s', e) pair strings of L ∥_{Σ_o} L with a controllable
    high-level event e such that Q(s)e and Q(s')e are in Q(L).
    """
    plant = _language(l, language, "LOC")
    d = _plant_dfa(plant)
    critical = sorted(ctx.sigma_hi & ctx.sigma_c)
    if not critical:
        return Verdict.holds("LOC", ProofKind.EXHAUSTIVE_FINITE, bound=0)
    high = project(d, ctx.sigma_hi, alphabet=ctx.high_alphabet)
    low = closed(d)
    pa = sync_pair_product(low, low, ctx.sigma_o)
    limit, exhaustive = _search_bound(pa, bound)

    def high_enables(word: Word, event: str) -> bool:
        state = _state_after(high, project_string(ctx, "Q", word))
        return state is not None and high.step(state, event) is not None

    candidates = (
        (s, s2, e)
        for s, s2 in iter_pair_language(pa, limit)
        for e in critical
        if high_enables(s, e) and high_enables(s2, e)
    )
    failure, judged = _first_failure(candidates, lambda c: _loc_witness(d, ctx, *c) is not None, workers)
    if failure is None:
        return _verdict("LOC", None, event=None, bound=limit, exhaustive=exhaustive, judged=judged)
    s, s2, e = failure
    return _verdict("LOC", (s, s2), event=e, bound=limit, exhaustive=exhaustive, judged=judged)
