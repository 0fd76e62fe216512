"""Exception hierarchy for automata, projections and synthesis.

All errors derive from `SupervisorError`, itself a `ValueError`, so callers that
treat malformed input as a value error keep working. Each error names the
offending element both in its message and as an attribute.
"""

from __future__ import annotations


class SupervisorError(ValueError):
    """Base class for every error raised by this package."""


class DanglingState(SupervisorError):
    """A transition, the initial state or a marked state is not declared."""

    def __init__(self, state: str, *, context: str = "transition") -> None:
        self.state = state
        super().__init__(f"Undeclared state '{state}' referenced by {context}")


class UnknownEvent(SupervisorError):
    """An event is used that is not part of the alphabet."""

    def __init__(self, event: str, *, context: str = "transition") -> None:
        self.event = event
        super().__init__(f"Unknown event '{event}' referenced by {context}")


class MultipleInitial(SupervisorError):
    """More than one initial state was declared."""

    def __init__(self, states: tuple[str, ...]) -> None:
        self.states = states
        super().__init__(f"Expected one initial state, got {', '.join(states)}")


class MissingInitial(SupervisorError):
    """No initial state was declared."""

    def __init__(self) -> None:
        super().__init__("Missing initial state")


class DuplicateName(SupervisorError):
    """A state or event name is declared twice."""

    def __init__(self, name: str, *, kind: str) -> None:
        self.name = name
        self.kind = kind
        super().__init__(f"Duplicate {kind} name '{name}'")


class InvalidName(SupervisorError):
    """A state or event name is not a valid token."""

    def __init__(self, name: str, *, kind: str) -> None:
        self.name = name
        self.kind = kind
        super().__init__(f"Invalid {kind} name {name!r}")


class AlphabetMismatch(SupervisorError):
    """Two operands do not share the alphabet an operation requires."""

    def __init__(self, left: tuple[str, ...], right: tuple[str, ...], *, reason: str = "alphabets differ") -> None:
        self.left = left
        self.right = right
        self.difference = tuple(sorted(set(left) ^ set(right)))
        super().__init__(f"Alphabet mismatch ({reason}): {', '.join(self.difference) or '-'}")


class DomainViolation(SupervisorError):
    """A string contains an event outside the domain of a projection."""

    def __init__(self, event: str, *, projection: str) -> None:
        self.event = event
        self.projection = projection
        super().__init__(f"Event '{event}' is outside the domain of projection {projection}")


class NotPrefixClosed(SupervisorError):
    """A language that must be prefix-closed is not."""

    def __init__(self, witness: tuple[str, ...], *, operand: str) -> None:
        self.witness = witness
        self.operand = operand
        shown = " ".join(witness) if witness else "ε"
        super().__init__(f"{operand} is not prefix-closed: prefix '{shown}' is missing")


class NotSublanguage(SupervisorError):
    """A specification is not contained in the language it must refine."""

    def __init__(self, witness: tuple[str, ...], *, operand: str) -> None:
        self.witness = witness
        self.operand = operand
        shown = " ".join(witness) if witness else "ε"
        super().__init__(f"{operand} is not a sublanguage: '{shown}' is not contained")


class BlockingPlant(SupervisorError):
    """The plant has a reachable state from which no marked state is reachable."""

    def __init__(self, state: str) -> None:
        self.state = state
        super().__init__(f"Plant is blocking: state '{state}' cannot reach a marked state")


class SpecNotInAbstraction(SupervisorError):
    """A high-level specification is not contained in the abstracted marked language."""

    def __init__(self, witness: tuple[str, ...]) -> None:
        self.witness = witness
        shown = " ".join(witness) if witness else "ε"
        super().__init__(f"Specification string '{shown}' is not in the abstracted marked language")


class SyncSetNotShared(SupervisorError):
    """The synchronization alphabet of a pair product is not shared by both operands."""

    def __init__(self, events: tuple[str, ...]) -> None:
        self.events = events
        super().__init__(f"Synchronization events not shared by both operands: {', '.join(events)}")


class UnmarkedState(SupervisorError):
    """An automaton that must have every state marked has an unmarked state."""

    def __init__(self, state: str) -> None:
        self.state = state
        super().__init__(f"State '{state}' must be marked")


class DesFormatError(SupervisorError):
    """A `.des` document is malformed."""

    def __init__(self, line: int, reason: str) -> None:
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class FixpointDivergence(SupervisorError):
    """A supremal fixpoint exceeded its iteration guard."""

    def __init__(self, operation: str, iterations: int) -> None:
        self.operation = operation
        self.iterations = iterations
        super().__init__(f"{operation} did not converge within {iterations} iterations")
