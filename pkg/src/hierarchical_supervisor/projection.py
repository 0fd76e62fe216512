"""Natural projections, composition and abstraction properties.

A `ProjectionContext` fixes the plant alphabet Σ together with the observable
events Σ_o and the high-level events Σ_hi. It induces four projections:

- P: Σ* -> Σ_o* (observation)
- Q: Σ* -> Σ_hi* (abstraction)
- P_hi: Σ_hi* -> (Σ_hi ∩ Σ_o)* (observation at the high level)
- Q_o: Σ_o* -> (Σ_hi ∩ Σ_o)*

and P_hi∘Q = Q_o∘P on every string.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Literal

from hierarchical_supervisor.automaton import Alphabet, Automaton, Word
from hierarchical_supervisor.errors import AlphabetMismatch, BlockingPlant, DomainViolation, UnknownEvent
from hierarchical_supervisor.language import (
    blocking_states,
    build_reachable,
    determinize,
    included,
    is_nonblocking,
    relabel,
    trim,
    with_initial,
    word_key,
)
from hierarchical_supervisor.verdict import CheckResult

logger = logging.getLogger(__name__)

ProjectionName = Literal["P", "Q", "P_hi", "Q_o"]


@dataclass(frozen=True)
class ProjectionContext:
    """Plant alphabet with the observable and high-level subsets."""

    sigma: Alphabet
    sigma_o: frozenset[str]
    sigma_hi: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma_o", frozenset(self.sigma_o))
        object.__setattr__(self, "sigma_hi", frozenset(self.sigma_hi))
        for role, members in (("observable", self.sigma_o), ("high-level", self.sigma_hi)):
            extra = members - self.sigma.event_set
            if extra:
                raise UnknownEvent(min(extra), context=f"{role} set of projection context")

    @classmethod
    def from_alphabet(
        cls,
        alphabet: Alphabet,
        *,
        highlevel: Iterable[str] | None = None,
        observable: Iterable[str] | None = None,
    ) -> ProjectionContext:
        """Context from an alphabet's flags, optionally overriding Σ_hi or Σ_o."""
        return cls(
            sigma=alphabet,
            sigma_o=alphabet.observable if observable is None else frozenset(observable),
            sigma_hi=alphabet.highlevel if highlevel is None else frozenset(highlevel),
        )

    @property
    def sigma_c(self) -> frozenset[str]:
        return self.sigma.controllable

    @property
    def sigma_uc(self) -> frozenset[str]:
        return self.sigma.uncontrollable

    @property
    def shared(self) -> frozenset[str]:
        """Σ_hi ∩ Σ_o."""
        return self.sigma_o & self.sigma_hi

    @property
    def low_events(self) -> frozenset[str]:
        """Σ \\ Σ_hi."""
        return self.sigma.event_set - self.sigma_hi

    @property
    def alphabet(self) -> Alphabet:
        """Σ with its observable/high-level flags set from this context."""
        return self.sigma.with_roles(observable=self.sigma_o, highlevel=self.sigma_hi)

    @property
    def high_alphabet(self) -> Alphabet:
        return self.alphabet.restrict(self.sigma_hi)

    def high_level_context(self) -> ProjectionContext:
        """Context over Σ_hi with observable events Σ_hi ∩ Σ_o (the P_hi setting)."""
        return ProjectionContext(sigma=self.high_alphabet, sigma_o=self.shared, sigma_hi=self.sigma_hi)

    def with_sets(
        self, *, observable: Iterable[str] | None = None, highlevel: Iterable[str] | None = None
    ) -> ProjectionContext:
        return ProjectionContext(
            sigma=self.sigma,
            sigma_o=self.sigma_o if observable is None else frozenset(observable),
            sigma_hi=self.sigma_hi if highlevel is None else frozenset(highlevel),
        )

    def domain(self, which: ProjectionName) -> frozenset[str]:
        if which in ("P", "Q"):
            return self.sigma.event_set
        if which == "P_hi":
            return self.sigma_hi
        return self.sigma_o

    def codomain(self, which: ProjectionName) -> frozenset[str]:
        if which == "P":
            return self.sigma_o
        if which == "Q":
            return self.sigma_hi
        return self.shared


def project_string(ctx: ProjectionContext, which: ProjectionName, word: Sequence[str]) -> Word:
    """Apply projection `which` to `word`.

    Raises:
        DomainViolation: `word` contains an event outside the projection's domain.
    """
    domain = ctx.domain(which)
    keep = ctx.codomain(which)
    for event in word:
        if event not in domain:
            raise DomainViolation(event, projection=which)
    return tuple(event for event in word if event in keep)


def project(a: Automaton, target: Iterable[str], *, alphabet: Alphabet | None = None) -> Automaton:
    """Deterministic minimal automaton for the projections of L(a) and L_m(a) onto `target`."""
    keep = frozenset(target)
    result_alphabet = alphabet if alphabet is not None else a.alphabet.restrict(keep)
    if result_alphabet.event_set != keep:
        raise AlphabetMismatch(result_alphabet.events, tuple(sorted(keep)), reason="projection target")
    if not keep <= a.alphabet.event_set:
        raise UnknownEvent(min(keep - a.alphabet.event_set), context="projection target")
    return relabel(a, {e: e for e in keep}, result_alphabet)


def inverse_project(a: Automaton, superset: Alphabet) -> Automaton:
    """Automaton for R⁻¹(L_m(a)) over `superset`: self-loops on the new events at every state."""
    if not a.alphabet.event_set <= superset.event_set:
        raise AlphabetMismatch(a.alphabet.events, superset.events, reason="inverse projection needs a superset")
    extra = [e for e in superset.events if e not in a.alphabet.event_set]
    transitions = set(a.transitions)
    transitions.update((state, event, state) for state in a.states for event in extra)
    return Automaton.build(a.states, superset, transitions, a.initial, a.marked)


def parallel(automata: Sequence[Automaton]) -> Automaton:
    """Synchronous composition: shared events move jointly, private events interleave."""
    if not automata:
        raise ValueError("parallel requires at least one automaton")
    if len(automata) == 1:
        return automata[0]
    alphabet = automata[0].alphabet
    for other in automata[1:]:
        alphabet = alphabet.union(other.alphabet)
    participants = {e: [i for i, a in enumerate(automata) if e in a.alphabet] for e in alphabet.events}

    def successors(states: tuple[str, ...]) -> Iterable[tuple[str, tuple[str, ...]]]:
        for event in alphabet.events:
            owners = participants[event]
            options = [automata[i].successors(states[i], event) for i in owners]
            if not all(options):
                continue
            for choice in itertools.product(*options):
                nxt = list(states)
                for i, target in zip(owners, choice, strict=True):
                    nxt[i] = target
                yield event, tuple(nxt)

    start = tuple(a.initial for a in automata)
    result, names = build_reachable(
        alphabet,
        start,
        successors,
        lambda states: all(s in a.marked for s, a in zip(states, automata, strict=True)),
    )
    logger.debug("parallel of %d automata: %d states", len(automata), len(names))
    return result


def nonconflicting(automata: Sequence[Automaton]) -> bool:
    """True iff the closure of the joint marked language equals the composition of closures."""
    if len(automata) <= 1:
        return True
    return is_nonblocking(parallel([trim(a) for a in automata]))


# --- observer and local control consistency --------------------------------


def _require_nonblocking(g: Automaton) -> None:
    blocked = blocking_states(g)
    if blocked:
        raise BlockingPlant(blocked[0])


def _low_reach(d: Automaton, state: str, events: frozenset[str]) -> dict[str, Word]:
    """States reachable from `state` via `events`, with the length-lex least path to each."""
    order = sorted(events)
    paths: dict[str, Word] = {state: ()}
    queue = deque([state])
    while queue:
        current = queue.popleft()
        for event in order:
            target = d.step(current, event)
            if target is not None and target not in paths:
                paths[target] = paths[current] + (event,)
                queue.append(target)
    return paths


def check_observer(g: Automaton, ctx: ProjectionContext) -> CheckResult:
    """Decide whether Q is an L_m(g)-observer.

    A failure carries `(s, t)` with s ∈ closure(L_m), Q(s) a prefix of t ∈ Q(L_m)
    and no u such that su ∈ L_m and Q(su) = t. Among failures the pair with the
    least |s| + |t| is returned.

    Raises:
        BlockingPlant: `g` is blocking.
    """
    _require_nonblocking(g)
    high_alphabet = ctx.alphabet.restrict(ctx.sigma_hi)
    d = determinize(trim(g), complete=False)
    h = project(d, ctx.sigma_hi, alphabet=high_alphabet)
    events = sorted(d.alphabet.events)
    abstractions: dict[str, Automaton] = {}

    def abstraction_from(x: str) -> Automaton:
        if x not in abstractions:
            abstractions[x] = project(with_initial(d, x), ctx.sigma_hi, alphabet=high_alphabet)
        return abstractions[x]

    # Dijkstra over the product with cost |s| + |Q(s)|.
    start = (d.initial, h.initial)
    best: dict[tuple[str, str], tuple[int, Word]] = {}
    heap: list[tuple[int, Word, Word, tuple[str, str]]] = [(0, (), (), start)]
    while heap:
        cost, word, image, node = heapq.heappop(heap)
        if node in best:
            continue
        best[node] = (cost, word)
        x, y = node
        for event in events:
            x2 = d.step(x, event)
            if x2 is None:
                continue
            if event in ctx.sigma_hi:
                y2 = h.step(y, event)
                if y2 is None:
                    continue
                nxt, step_cost, image2 = (x2, y2), 2, image + (event,)
            else:
                nxt, step_cost, image2 = (x2, y), 1, image
            if nxt not in best:
                heapq.heappush(heap, (cost + step_cost, word + (event,), image2, nxt))

    failure: tuple[int, Word, Word] | None = None
    for (x, y), (cost, word) in best.items():
        result = included(with_initial(h, y), abstraction_from(x))
        if result:
            continue
        continuation = result.counterexample[0]
        image = tuple(e for e in word if e in ctx.sigma_hi)
        candidate = (cost + len(continuation), word, image + continuation)
        if failure is None or (candidate[0], word_key(candidate[1]), candidate[2]) < (
            failure[0],
            word_key(failure[1]),
            failure[2],
        ):
            failure = candidate
    logger.debug("check_observer: %d product states, failure=%s", len(best), failure is not None)
    if failure is None:
        return CheckResult.ok()
    return CheckResult.failed(failure[1], failure[2])


def check_lcc(g: Automaton, ctx: ProjectionContext) -> CheckResult:
    """Decide local control consistency of Q with respect to L(g) and Σ_uc.

    A failure carries `(s,)` and the uncontrollable high-level event `e`:
    some low-level string u gives sue ∈ L(g) but no uncontrollable one does.
    """
    d = determinize(g, complete=False)
    h = project(d, ctx.sigma_hi, alphabet=ctx.alphabet.restrict(ctx.sigma_hi))
    low = ctx.low_events
    low_uc = low - ctx.sigma_c
    critical = sorted(ctx.sigma_hi - ctx.sigma_c)
    if not critical:
        return CheckResult.ok()
    reach_any: dict[str, frozenset[str]] = {}
    reach_uc: dict[str, frozenset[str]] = {}

    def enabled_after(cache: dict[str, frozenset[str]], x: str, events: frozenset[str]) -> frozenset[str]:
        if x not in cache:
            cache[x] = frozenset(e for state in _low_reach(d, x, events) for e in d.enabled(state))
        return cache[x]

    events = sorted(d.alphabet.events)
    start = (d.initial, h.initial)
    seen = {start}
    queue: deque[tuple[tuple[str, str], Word]] = deque([(start, ())])
    while queue:
        (x, y), word = queue.popleft()
        enabled_high = h.enabled(y)
        for e in critical:
            if e not in enabled_high:
                continue
            if e in enabled_after(reach_any, x, low) and e not in enabled_after(reach_uc, x, low_uc):
                logger.debug("check_lcc: violated after %s on %s", word, e)
                return CheckResult.failed(word, event=e)
        for event in events:
            x2 = d.step(x, event)
            if x2 is None:
                continue
            y2 = h.step(y, event) if event in ctx.sigma_hi else y
            if y2 is None:
                continue
            node = (x2, y2)
            if node not in seen:
                seen.add(node)
                queue.append((node, word + (event,)))
    return CheckResult.ok()


def _state_after(d: Automaton, word: Sequence[str]) -> str | None:
    state: str | None = d.initial
    for event in word:
        if state is None:
            return None
        state = d.step(state, event)
    return state


def extend_observer_lcc(
    g: Automaton,
    seed: Iterable[str],
    *,
    controllable: Iterable[str] | None = None,
) -> tuple[str, ...]:
    """Grow `seed` until Q onto it is an L_m(g)-observer and LCC.

    Greedy and counterexample guided:
    - observer failure (s, t): add the first low-level event of s in alphabet order;
    - LCC failure (s, e): add the first controllable event, in alphabet order,
      on the shortest low-level path enabling e after s;
    - otherwise add the first remaining event in alphabet order.

    Returns:
        The seed events in alphabet order followed by the added events in the
        order they were added.
    """
    alphabet = g.alphabet
    chosen = list(alphabet.sorted_events(seed))
    controllable_set = alphabet.controllable if controllable is None else frozenset(controllable)
    sigma = alphabet.with_roles(controllable=controllable_set)
    d = determinize(g, complete=False)
    while True:
        ctx = ProjectionContext(sigma=sigma, sigma_o=alphabet.observable, sigma_hi=frozenset(chosen))
        added: str | None = None
        observer = check_observer(g, ctx)
        if not observer:
            s = observer.counterexample[0]
            low_in_s = [e for e in alphabet.events if e in s and e not in ctx.sigma_hi]
            added = low_in_s[0] if low_in_s else None
            reason = "observer"
        else:
            lcc = check_lcc(g, ctx)
            if lcc:
                logger.info("Observer/LCC alphabet: %d of %d events", len(chosen), len(alphabet))
                return tuple(chosen)
            reason = "lcc"
            x = _state_after(d, lcc.counterexample[0])
            if x is not None and lcc.event is not None:
                for state, path in sorted(_low_reach(d, x, ctx.low_events).items(), key=lambda kv: word_key(kv[1])):
                    if lcc.event in d.enabled(state):
                        on_path = [e for e in alphabet.events if e in path and e in controllable_set]
                        added = on_path[0] if on_path else None
                        break
        if added is None:
            remaining = [e for e in alphabet.events if e not in ctx.sigma_hi]
            added = remaining[0]
        logger.debug("extend_observer_lcc: adding %s (%s failure)", added, reason)
        chosen.append(added)
