"""Alphabet and automaton value types.

An `Automaton` is an immutable finite-state acceptor. Its generated language
L(A) is the set of strings labelling paths from the initial state, its marked
language L_m(A) the subset ending in marked states. Event attributes
(controllable, observable, high-level) live on the `Alphabet`.

Values are plain frozen dataclasses: they can be shared between threads and
every operation in this package returns new values instead of mutating inputs.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, replace
from functools import cached_property

from hierarchical_supervisor.errors import (
    DanglingState,
    DuplicateName,
    InvalidName,
    MissingInitial,
    UnknownEvent,
)

Word = tuple[str, ...]
Transition = tuple[str, str, str]

EVENT_TOKEN = r"[A-Za-z0-9_@#$']+"
# Pair events produced by the relational module render as `left|right`, ε as `-`.
_EVENT_RE = re.compile(rf"{EVENT_TOKEN}|(?:{EVENT_TOKEN}|-)\|(?:{EVENT_TOKEN}|-)")
_STATE_RE = re.compile(r"[^\s\[\]]+")


def is_event_name(name: str) -> bool:
    """Return True if `name` is a valid event (or rendered pair-event) token."""
    return _EVENT_RE.fullmatch(name) is not None


@dataclass(frozen=True)
class Alphabet:
    """Ordered event set with controllable/observable/high-level attributes."""

    events: tuple[str, ...]
    controllable: frozenset[str] = frozenset()
    observable: frozenset[str] = frozenset()
    highlevel: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        seen: set[str] = set()
        for event in self.events:
            if not is_event_name(event):
                raise InvalidName(event, kind="event")
            if event in seen:
                raise DuplicateName(event, kind="event")
            seen.add(event)
        for role in ("controllable", "observable", "highlevel"):
            members = frozenset(getattr(self, role))
            object.__setattr__(self, role, members)
            extra = members - seen
            if extra:
                raise UnknownEvent(min(extra), context=f"{role} set")

    def __contains__(self, event: object) -> bool:
        return event in self.event_set

    def __iter__(self) -> Iterator[str]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    @cached_property
    def event_set(self) -> frozenset[str]:
        return frozenset(self.events)

    @cached_property
    def order(self) -> dict[str, int]:
        """Declaration index of each event."""
        return {event: i for i, event in enumerate(self.events)}

    @property
    def uncontrollable(self) -> frozenset[str]:
        return self.event_set - self.controllable

    @property
    def unobservable(self) -> frozenset[str]:
        return self.event_set - self.observable

    def sorted_events(self, events: Iterable[str]) -> tuple[str, ...]:
        """Return `events` in declaration order."""
        return tuple(sorted(set(events), key=self.order.__getitem__))

    def restrict(self, events: Iterable[str]) -> Alphabet:
        """Sub-alphabet over `events` (kept in declaration order, attributes intersected)."""
        keep = frozenset(events)
        missing = keep - self.event_set
        if missing:
            raise UnknownEvent(min(missing), context="alphabet restriction")
        return Alphabet(
            events=tuple(e for e in self.events if e in keep),
            controllable=self.controllable & keep,
            observable=self.observable & keep,
            highlevel=self.highlevel & keep,
        )

    def union(self, other: Alphabet) -> Alphabet:
        """Union alphabet: this alphabet's order first, then new events of `other`."""
        extra = tuple(e for e in other.events if e not in self.event_set)
        return Alphabet(
            events=self.events + extra,
            controllable=self.controllable | other.controllable,
            observable=self.observable | other.observable,
            highlevel=self.highlevel | other.highlevel,
        )

    def with_roles(
        self,
        *,
        controllable: Iterable[str] | None = None,
        observable: Iterable[str] | None = None,
        highlevel: Iterable[str] | None = None,
    ) -> Alphabet:
        """Copy with some attribute sets replaced."""
        return Alphabet(
            events=self.events,
            controllable=self.controllable if controllable is None else frozenset(controllable),
            observable=self.observable if observable is None else frozenset(observable),
            highlevel=self.highlevel if highlevel is None else frozenset(highlevel),
        )


@dataclass(frozen=True)
class Automaton:
    """Finite automaton over an `Alphabet`.

    Use `Automaton.build(...)` to construct values with the deterministic flag
    computed, and `validate(...)` to additionally check every structural
    invariant (as done when reading files).
    """

    states: tuple[str, ...]
    alphabet: Alphabet
    transitions: frozenset[Transition]
    initial: str
    marked: frozenset[str]
    deterministic: bool = False

    @classmethod
    def build(
        cls,
        states: Iterable[str],
        alphabet: Alphabet,
        transitions: Iterable[Transition],
        initial: str,
        marked: Iterable[str],
    ) -> Automaton:
        trans = frozenset(transitions)
        return cls(
            states=tuple(states),
            alphabet=alphabet,
            transitions=trans,
            initial=initial,
            marked=frozenset(marked),
            deterministic=_is_deterministic(trans),
        )

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {state: i for i, state in enumerate(self.states)}

    @cached_property
    def delta(self) -> dict[str, dict[str, tuple[str, ...]]]:
        """Successor map: state -> event -> targets (in state declaration order)."""
        index = self.state_index
        table: dict[str, dict[str, list[str]]] = {state: {} for state in self.states}
        for source, event, target in self.transitions:
            table.setdefault(source, {}).setdefault(event, []).append(target)
        return {
            state: {event: tuple(sorted(targets, key=lambda t: index.get(t, -1))) for event, targets in row.items()}
            for state, row in table.items()
        }

    @cached_property
    def sorted_transitions(self) -> tuple[Transition, ...]:
        """Transitions in canonical order: source, event, target by declaration index."""
        index = self.state_index
        order = self.alphabet.order
        return tuple(
            sorted(
                self.transitions,
                key=lambda t: (index.get(t[0], -1), order.get(t[1], -1), index.get(t[2], -1)),
            )
        )

    def successors(self, state: str, event: str) -> tuple[str, ...]:
        return self.delta.get(state, {}).get(event, ())

    def step(self, state: str, event: str) -> str | None:
        """Deterministic successor, or None when `event` is not enabled."""
        targets = self.successors(state, event)
        return targets[0] if targets else None

    def enabled(self, state: str) -> frozenset[str]:
        return frozenset(self.delta.get(state, {}))

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    @property
    def num_events(self) -> int:
        return len(self.alphabet)


def _is_deterministic(transitions: frozenset[Transition]) -> bool:
    seen: set[tuple[str, str]] = set()
    for source, event, _ in transitions:
        if (source, event) in seen:
            return False
        seen.add((source, event))
    return True


def validate(a: Automaton) -> Automaton:
    """Check structural invariants and return `a` with the deterministic flag computed."""
    declared: set[str] = set()
    for state in a.states:
        if not _STATE_RE.fullmatch(state):
            raise InvalidName(state, kind="state")
        if state in declared:
            raise DuplicateName(state, kind="state")
        declared.add(state)
    if not a.initial:
        raise MissingInitial()
    if a.initial not in declared:
        raise DanglingState(a.initial, context="initial")
    for state in sorted(a.marked - declared):
        raise DanglingState(state, context="marked")
    for source, event, target in a.sorted_transitions:
        for endpoint in (source, target):
            if endpoint not in declared:
                raise DanglingState(endpoint, context=f"transition {source} {event} {target}")
        if event not in a.alphabet:
            raise UnknownEvent(event, context=f"transition {source} {event} {target}")
    return replace(a, deterministic=_is_deterministic(a.transitions))
