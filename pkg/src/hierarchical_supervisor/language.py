"""Language-level operations on automata.

Conventions:
- Set operations act on marked languages. To work with a generated language
  L(A) as a marked language use `closed(a)`.
- New states are named `q0, q1, ...` in breadth-first discovery order with
  events visited in alphabet declaration order, so outputs are reproducible.
- Strings are ordered length-then-lexicographically on event names.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, replace
from typing import Literal, TypeVar

from hierarchical_supervisor.automaton import Alphabet, Automaton, Transition, Word
from hierarchical_supervisor.errors import AlphabetMismatch, UnknownEvent
from hierarchical_supervisor.verdict import CheckResult

logger = logging.getLogger(__name__)

K = TypeVar("K", bound=Hashable)

SetOperation = Literal["union", "intersection", "difference"]


@dataclass(frozen=True)
class LanguageSample:
    """All marked strings of length <= depth, in length-lex order."""

    strings: tuple[Word, ...]
    depth: int

    def __contains__(self, word: object) -> bool:
        return word in self.as_set()

    def __iter__(self) -> Iterator[Word]:
        return iter(self.strings)

    def __len__(self) -> int:
        return len(self.strings)

    def as_set(self) -> frozenset[Word]:
        return frozenset(self.strings)


def word_key(word: Sequence[str]) -> tuple[int, tuple[str, ...]]:
    """Sort key for length-lex order."""
    return (len(word), tuple(word))


def build_reachable(
    alphabet: Alphabet,
    initial: K,
    successors: Callable[[K], Iterable[tuple[str, K]]],
    is_marked: Callable[[K], bool],
) -> tuple[Automaton, dict[K, str]]:
    """Explore an implicit automaton breadth-first and materialize its reachable part.

    Args:
        alphabet: Alphabet of the result.
        initial: Key of the initial state.
        successors: Yields `(event, target_key)` pairs in a deterministic order.
        is_marked: Marking predicate on keys.

    Returns:
        The automaton and the key -> state-name map.
    """
    names: dict[K, str] = {initial: "q0"}
    order: list[K] = [initial]
    transitions: list[Transition] = []
    queue: deque[K] = deque([initial])
    while queue:
        key = queue.popleft()
        source = names[key]
        for event, target in successors(key):
            name = names.get(target)
            if name is None:
                name = f"q{len(names)}"
                names[target] = name
                order.append(target)
                queue.append(target)
            transitions.append((source, event, name))
    marked = [names[key] for key in order if is_marked(key)]
    return Automaton.build([names[key] for key in order], alphabet, transitions, "q0", marked), names


# --- constructors -----------------------------------------------------------


def empty_automaton(alphabet: Alphabet) -> Automaton:
    """Automaton with the empty marked language (single unmarked state)."""
    return Automaton.build(("q0",), alphabet, (), "q0", ())


def epsilon_automaton(alphabet: Alphabet) -> Automaton:
    """Automaton marking exactly the empty string."""
    return Automaton.build(("q0",), alphabet, (), "q0", ("q0",))


def sigma_star(alphabet: Alphabet) -> Automaton:
    """Automaton marking every string over `alphabet`."""
    return Automaton.build(("q0",), alphabet, (("q0", e, "q0") for e in alphabet.events), "q0", ("q0",))


def from_strings(strings: Iterable[Sequence[str]], alphabet: Alphabet) -> Automaton:
    """Prefix-tree automaton marking exactly `strings`."""
    words = {tuple(w) for w in strings}
    for word in words:
        for event in word:
            if event not in alphabet:
                raise UnknownEvent(event, context="string")
    prefixes = {w[:i] for w in words for i in range(len(w) + 1)} | {()}
    ordered = sorted(prefixes, key=word_key)
    names = {prefix: f"q{i}" for i, prefix in enumerate(ordered)}
    transitions = [(names[p[:-1]], p[-1], names[p]) for p in ordered if p]
    return Automaton.build([names[p] for p in ordered], alphabet, transitions, "q0", (names[w] for w in words))


# --- structural operations --------------------------------------------------


def _reachable(a: Automaton) -> set[str]:
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        state = queue.popleft()
        for targets in a.delta.get(state, {}).values():
            for target in targets:
                if target not in seen:
                    seen.add(target)
                    queue.append(target)
    return seen


def _coreachable(a: Automaton) -> set[str]:
    predecessors: dict[str, set[str]] = {}
    for source, _, target in a.transitions:
        predecessors.setdefault(target, set()).add(source)
    seen = set(a.marked)
    queue = deque(seen)
    while queue:
        state = queue.popleft()
        for source in predecessors.get(state, ()):
            if source not in seen:
                seen.add(source)
                queue.append(source)
    return seen


def _restrict_states(a: Automaton, keep: set[str]) -> Automaton:
    return Automaton.build(
        (s for s in a.states if s in keep),
        a.alphabet,
        (t for t in a.transitions if t[0] in keep and t[2] in keep),
        a.initial,
        a.marked & keep,
    )


def accessible(a: Automaton) -> Automaton:
    """Restrict to states reachable from the initial state (L and L_m unchanged)."""
    return _restrict_states(a, _reachable(a))


def trim(a: Automaton) -> Automaton:
    """Accessible and coaccessible part; L_m unchanged, L becomes closure(L_m)."""
    keep = _reachable(a) & _coreachable(a)
    if a.initial not in keep:
        return empty_automaton(a.alphabet)
    return _restrict_states(a, keep)


def closed(a: Automaton) -> Automaton:
    """The generated language of `a` as a marked language (all accessible states marked)."""
    acc = accessible(a)
    return replace(acc, marked=frozenset(acc.states))


def with_initial(a: Automaton, state: str) -> Automaton:
    return replace(a, initial=state)


def is_nonblocking(a: Automaton) -> bool:
    """True iff every reachable state can reach a marked state."""
    return _reachable(a) <= _coreachable(a)


def blocking_states(a: Automaton) -> tuple[str, ...]:
    """Reachable states from which no marked state is reachable, in declaration order."""
    bad = _reachable(a) - _coreachable(a)
    return tuple(s for s in a.states if s in bad)


def is_acyclic(a: Automaton) -> bool:
    """True iff the accessible part has no cycle (finite generated language)."""
    return longest_path_length(a) is not None


def longest_path_length(a: Automaton) -> int | None:
    """Length of the longest path from the initial state, or None when a cycle is reachable."""
    reachable = _reachable(a)
    # Kahn's algorithm on the accessible subgraph.
    indegree = {s: 0 for s in reachable}
    for source, _, target in a.transitions:
        if source in reachable:
            indegree[target] += 1
    queue = deque(s for s in a.states if s in reachable and indegree[s] == 0)
    depth = {s: 0 for s in reachable}
    visited = 0
    while queue:
        state = queue.popleft()
        visited += 1
        for targets in a.delta.get(state, {}).values():
            for target in targets:
                depth[target] = max(depth[target], depth[state] + 1)
                indegree[target] -= 1
                if indegree[target] == 0:
                    queue.append(target)
    if visited != len(reachable):
        return None
    return max(depth.values(), default=0)


# --- determinization and minimization ---------------------------------------


def determinize(a: Automaton, *, complete: bool = True) -> Automaton:
    """Reachable subset construction.

    With `complete=True` the empty subset becomes an explicit sink, so the
    result is complete over its alphabet (generated language Σ*). With
    `complete=False` the generated language is preserved as well.
    """
    events = a.alphabet.events

    def successors(subset: frozenset[str]) -> Iterator[tuple[str, frozenset[str]]]:
        for event in events:
            target = frozenset(t for s in subset for t in a.successors(s, event))
            if target or complete:
                yield event, target

    result, names = build_reachable(a.alphabet, frozenset({a.initial}), successors, lambda s: bool(s & a.marked))
    logger.debug("determinize: %d states -> %d subsets", a.num_states, len(names))
    return result


def _as_partial_dfa(a: Automaton) -> Automaton:
    return a if a.deterministic else determinize(a, complete=False)


def minimize(a: Automaton) -> Automaton:
    """Minimal deterministic automaton with the same generated and marked languages.

    Moore-style partition refinement on the accessible partial DFA; undefined
    transitions are kept undefined, so L(A) is preserved alongside L_m(A).
    """
    d = accessible(_as_partial_dfa(a))
    events = d.alphabet.events
    block: dict[str, int] = {s: (1 if s in d.marked else 0) for s in d.states}
    count = len(set(block.values()))
    while True:
        signatures: dict[tuple[object, ...], int] = {}
        refined: dict[str, int] = {}
        for state in d.states:
            row = tuple(block[t] if (t := d.step(state, e)) is not None else -1 for e in events)
            refined[state] = signatures.setdefault((block[state], row), len(signatures))
        block = refined
        if len(signatures) == count:
            break
        count = len(signatures)

    representative: dict[int, str] = {}
    for state in d.states:
        representative.setdefault(block[state], state)

    def successors(b: int) -> Iterator[tuple[str, int]]:
        rep = representative[b]
        for event in events:
            target = d.step(rep, event)
            if target is not None:
                yield event, block[target]

    result, _ = build_reachable(d.alphabet, block[d.initial], successors, lambda b: representative[b] in d.marked)
    return result


# --- boolean operations -----------------------------------------------------


def _require_same_alphabet(a: Automaton, b: Automaton) -> None:
    if a.alphabet.event_set != b.alphabet.event_set:
        raise AlphabetMismatch(a.alphabet.events, b.alphabet.events)


def combine(op: SetOperation, a: Automaton, b: Automaton) -> Automaton:
    """Union, intersection or difference of marked languages over a shared alphabet."""
    _require_same_alphabet(a, b)
    events = a.alphabet.events
    if op == "intersection":

        def meet(pair: tuple[str, str]) -> Iterator[tuple[str, tuple[str, str]]]:
            p, q = pair
            for event in events:
                for p2 in a.successors(p, event):
                    for q2 in b.successors(q, event):
                        yield event, (p2, q2)

        result, _ = build_reachable(
            a.alphabet, (a.initial, b.initial), meet, lambda pq: pq[0] in a.marked and pq[1] in b.marked
        )
        return result

    da = determinize(a)
    db = determinize(b)
    if op == "union":
        accept: Callable[[bool, bool], bool] = lambda x, y: x or y  # noqa: E731
    elif op == "difference":
        accept = lambda x, y: x and not y  # noqa: E731
    else:
        raise ValueError(f"Unsupported set operation '{op}'")

    def joint(pair: tuple[str, str]) -> Iterator[tuple[str, tuple[str, str]]]:
        p, q = pair
        for event in events:
            p2, q2 = da.step(p, event), db.step(q, event)
            if p2 is not None and q2 is not None:
                yield event, (p2, q2)

    result, _ = build_reachable(
        a.alphabet, (da.initial, db.initial), joint, lambda pq: accept(pq[0] in da.marked, pq[1] in db.marked)
    )
    return trim(result)


def complement(a: Automaton) -> Automaton:
    """Automaton marking Σ* minus L_m(a), trimmed."""
    d = determinize(a)
    return trim(replace(d, marked=frozenset(d.states) - d.marked))


def concat_sigma_star(a: Automaton) -> Automaton:
    """Automaton marking L_m(a)·Σ*."""
    d = determinize(a, complete=False)
    transitions = [t for t in d.transitions if t[0] not in d.marked]
    transitions.extend((s, e, s) for s in d.marked for e in d.alphabet.events)
    return trim(Automaton.build(d.states, d.alphabet, transitions, d.initial, d.marked))


def prefix_closure(a: Automaton) -> Automaton:
    """Automaton marking the prefix closure of L_m(a)."""
    t = trim(a)
    if not t.marked:
        return t
    return replace(t, marked=frozenset(t.states))


# --- queries ----------------------------------------------------------------


def _sorted_events(a: Automaton) -> list[str]:
    return sorted(a.alphabet.events)


def shortest_accepted(a: Automaton) -> Word | None:
    """Length-lex least marked string, or None for the empty language."""
    events = _sorted_events(a)
    start = frozenset({a.initial})
    parent: dict[frozenset[str], tuple[frozenset[str], str] | None] = {start: None}
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        if subset & a.marked:
            return _unwind(parent, subset)
        for event in events:
            target = frozenset(t for s in subset for t in a.successors(s, event))
            if target and target not in parent:
                parent[target] = (subset, event)
                queue.append(target)
    return None


def _unwind(parent: Mapping[K, tuple[K, str] | None], node: K) -> Word:
    word: list[str] = []
    link = parent[node]
    while link is not None:
        node, event = link
        word.append(event)
        link = parent[node]
    return tuple(reversed(word))


def included(a: Automaton, b: Automaton) -> CheckResult:
    """Decide L_m(a) ⊆ L_m(b); a failure carries the length-lex least witness."""
    _require_same_alphabet(a, b)
    events = _sorted_events(a)
    start = (frozenset({a.initial}), frozenset({b.initial}))
    parent: dict[tuple[frozenset[str], frozenset[str]], tuple[tuple[frozenset[str], frozenset[str]], str] | None] = {
        start: None
    }
    queue = deque([start])
    while queue:
        node = queue.popleft()
        left, right = node
        if left & a.marked and not right & b.marked:
            return CheckResult.failed(_unwind(parent, node))
        for event in events:
            left2 = frozenset(t for s in left for t in a.successors(s, event))
            if not left2:
                continue
            right2 = frozenset(t for s in right for t in b.successors(s, event))
            target = (left2, right2)
            if target not in parent:
                parent[target] = (node, event)
                queue.append(target)
    return CheckResult.ok()


def equivalent(a: Automaton, b: Automaton) -> bool:
    """Decide L_m(a) = L_m(b)."""
    return bool(included(a, b)) and bool(included(b, a))


def difference_witness(a: Automaton, b: Automaton) -> Word | None:
    """Shortest string in the symmetric difference of the marked languages, or None."""
    candidates = [r.counterexample[0] for r in (included(a, b), included(b, a)) if not r]
    return min(candidates, key=word_key) if candidates else None


def enumerate_language(a: Automaton, depth: int) -> LanguageSample:
    """Every marked string of length <= depth, in length-lex order."""
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    events = _sorted_events(a)
    frontier: list[tuple[Word, frozenset[str]]] = [((), frozenset({a.initial}))]
    found: list[Word] = []
    for level in range(depth + 1):
        found.extend(word for word, subset in frontier if subset & a.marked)
        if level == depth:
            break
        nxt: list[tuple[Word, frozenset[str]]] = []
        for word, subset in frontier:
            for event in events:
                target = frozenset(t for s in subset for t in a.successors(s, event))
                if target:
                    nxt.append((word + (event,), target))
        frontier = nxt
    return LanguageSample(strings=tuple(found), depth=depth)


def enumerate_generated(a: Automaton, depth: int) -> LanguageSample:
    """Every string of L(a) with length <= depth."""
    return enumerate_language(closed(a), depth)


def member(a: Automaton, word: Sequence[str]) -> bool:
    """True iff `word` is in L_m(a); events outside the alphabet are never accepted."""
    current = frozenset({a.initial})
    for event in word:
        current = frozenset(t for s in current for t in a.successors(s, event))
        if not current:
            return False
    return bool(current & a.marked)


# --- relabeling -------------------------------------------------------------


def relabel(
    a: Automaton,
    mapping: Mapping[str, str | None],
    alphabet: Alphabet,
    *,
    minimal: bool = True,
) -> Automaton:
    """Rename events by `mapping` (None erases) and determinize with ε-closure.

    Events missing from `mapping` are erased. The result's generated and
    marked languages are the images of those of `a`.
    """
    labelled: dict[str, dict[str, set[str]]] = {}
    silent: dict[str, set[str]] = {}
    for source, event, target in a.transitions:
        label = mapping.get(event)
        if label is None:
            silent.setdefault(source, set()).add(target)
        else:
            if label not in alphabet:
                raise UnknownEvent(label, context="relabeling")
            labelled.setdefault(source, {}).setdefault(label, set()).add(target)

    closures: dict[str, frozenset[str]] = {}

    def closure_of(state: str) -> frozenset[str]:
        cached = closures.get(state)
        if cached is not None:
            return cached
        seen = {state}
        stack = [state]
        while stack:
            s = stack.pop()
            for t in silent.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        result = frozenset(seen)
        closures[state] = result
        return result

    def close(states: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for s in states:
            out |= closure_of(s)
        return frozenset(out)

    events = alphabet.events

    def successors(subset: frozenset[str]) -> Iterator[tuple[str, frozenset[str]]]:
        for event in events:
            step = [t for s in subset for t in labelled.get(s, {}).get(event, ())]
            if step:
                yield event, close(step)

    result, names = build_reachable(alphabet, close([a.initial]), successors, lambda s: bool(s & a.marked))
    logger.debug("relabel: %d states -> %d subsets", a.num_states, len(names))
    return minimize(result) if minimal else result
