"""Read and write the line-oriented `.des` automaton format.

Example:

    # two-state plant
    events: a[co h] b[o] c[c]
    states: q0 q1
    initial: q0
    marked: q0
    trans: q0 a q1
    trans: q1 b q0

Event flags: c = controllable, o = observable, h = high-level; a missing flag
puts the event in the complementary set. Lines whose first non-blank character
is `#` are comments (`#` is also a legal event name, so trailing comments are
not supported). `events:`, `states:` and `marked:` may be repeated and
accumulate.

Serialization is canonical: sections in the order events, states, initial,
marked, trans; flags written as `[coh]`; transitions sorted by declaration
order of source, event and target.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterable
from pathlib import Path

from hierarchical_supervisor.automaton import Alphabet, Automaton, Transition, validate
from hierarchical_supervisor.errors import DesFormatError, MultipleInitial

logger = logging.getLogger(__name__)

_FLAG_GROUP_RE = re.compile(r"\[([^\]]*)\]")
_EVENT_DECL_RE = re.compile(r"(?P<name>[^\s\[\]]+)(?:\[(?P<flags>[^\]]*)\])?")
_KEYS = ("events", "states", "initial", "marked", "trans", "highlevel")
_FLAGS = frozenset("coh")


def _parse_events(rest: str, line_no: int) -> list[tuple[str, str]]:
    # Flags may contain blanks (`a[co h]`); squeeze them before splitting.
    squeezed = _FLAG_GROUP_RE.sub(lambda m: "[" + "".join(m.group(1).split()) + "]", rest)
    out: list[tuple[str, str]] = []
    for token in squeezed.split():
        match = _EVENT_DECL_RE.fullmatch(token)
        if match is None:
            raise DesFormatError(line_no, f"malformed event declaration {token!r}")
        flags = match.group("flags") or ""
        unknown = set(flags) - _FLAGS
        if unknown:
            raise DesFormatError(line_no, f"unknown event flag(s) {''.join(sorted(unknown))!r} on '{match['name']}'")
        out.append((match.group("name"), flags))
    return out


def parse_des(text: str, *, highlevel: Iterable[str] | None = None) -> Automaton:
    """Parse a `.des` document into a validated automaton.

    Args:
        text: Document contents.
        highlevel: Optional override of the high-level event set (replaces the
            `h` flags and any `highlevel:` line).

    Raises:
        DesFormatError: Syntax errors, with the 1-based line number.
        SupervisorError: Structural errors reported by `validate`.
    """
    events: list[str] = []
    controllable: set[str] = set()
    observable: set[str] = set()
    flagged_high: set[str] = set()
    listed_high: list[str] | None = None
    states: list[str] = []
    initial: list[str] = []
    marked: list[str] = []
    transitions: list[Transition] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if not sep or key not in _KEYS:
            raise DesFormatError(line_no, f"expected one of {', '.join(k + ':' for k in _KEYS)}")
        tokens = rest.split()
        if key == "events":
            for name, flags in _parse_events(rest, line_no):
                events.append(name)
                if "c" in flags:
                    controllable.add(name)
                if "o" in flags:
                    observable.add(name)
                if "h" in flags:
                    flagged_high.add(name)
        elif key == "states":
            states.extend(tokens)
        elif key == "initial":
            if len(tokens) != 1:
                raise DesFormatError(line_no, "initial: expects exactly one state")
            initial.append(tokens[0])
        elif key == "marked":
            marked.extend(tokens)
        elif key == "highlevel":
            listed_high = (listed_high or []) + tokens
        else:
            if len(tokens) != 3:
                raise DesFormatError(line_no, "trans: expects 'source event target'")
            transitions.append((tokens[0], tokens[1], tokens[2]))

    if len(initial) > 1:
        raise MultipleInitial(tuple(initial))
    if highlevel is not None:
        high = set(highlevel)
    elif listed_high is not None:
        high = set(listed_high)
    else:
        high = flagged_high

    alphabet = Alphabet(
        events=tuple(events),
        controllable=frozenset(controllable),
        observable=frozenset(observable),
        highlevel=frozenset(high),
    )
    automaton = Automaton(
        states=tuple(states),
        alphabet=alphabet,
        transitions=frozenset(transitions),
        initial=initial[0] if initial else "",
        marked=frozenset(marked),
    )
    return validate(automaton)


def _event_decl(alphabet: Alphabet, event: str) -> str:
    flags = "".join(
        flag
        for flag, members in (("c", alphabet.controllable), ("o", alphabet.observable), ("h", alphabet.highlevel))
        if event in members
    )
    return f"{event}[{flags}]" if flags else event


def serialize_des(a: Automaton) -> str:
    """Canonical `.des` text for `a` (terminated by a newline)."""
    lines = [
        " ".join(["events:", *(_event_decl(a.alphabet, e) for e in a.alphabet.events)]),
        " ".join(["states:", *a.states]),
        f"initial: {a.initial}",
        " ".join(["marked:", *(s for s in a.states if s in a.marked)]),
    ]
    lines.extend(f"trans: {s} {e} {t}" for s, e, t in a.sorted_transitions)
    return "\n".join(lines) + "\n"


def load_des(path: str | Path, *, highlevel: Iterable[str] | None = None) -> Automaton:
    """Read and parse a `.des` file; error messages are prefixed with the file name."""
    path = Path(path)
    try:
        automaton = parse_des(path.read_text(encoding="utf-8"), highlevel=highlevel)
    except DesFormatError as exc:
        raise DesFormatError(exc.line, f"{path.name}: {exc.reason}") from exc
    logger.debug(
        "Loaded %s: %d states, %d transitions, %d events",
        path,
        automaton.num_states,
        automaton.num_transitions,
        automaton.num_events,
    )
    return automaton


def write_des(a: Automaton, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_des(a), encoding="utf-8")
    return path


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(a: Automaton, *, name: str = "G") -> str:
    """Graphviz DOT description; parallel edges are merged into one labelled edge."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", '  __start__ [shape=point, label=""];']
    for state in a.states:
        shape = "doublecircle" if state in a.marked else "circle"
        lines.append(f"  {_quote(state)} [shape={shape}];")
    lines.append(f"  __start__ -> {_quote(a.initial)};")
    labels: dict[tuple[str, str], list[str]] = {}
    for source, event, target in a.sorted_transitions:
        labels.setdefault((source, target), []).append(event)
    for (source, target), events in labels.items():
        lines.append(f"  {_quote(source)} -> {_quote(target)} [label={_quote(', '.join(events))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

