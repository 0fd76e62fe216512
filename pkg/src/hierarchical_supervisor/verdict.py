"""Result types shared by the checkers.

`Verdict` is the honest three-valued outcome of a consistency check whose
general decision problem is open: it either holds (with the kind of proof),
is violated (with a counterexample that re-fails the definition), or passed a
bounded search only. `CheckResult` is the two-valued result of decidable checks
(inclusion, controllability, ...) together with a shortest witness.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

Word = tuple[str, ...]

EXIT_HOLDS = 0
EXIT_VIOLATED = 1
EXIT_BOUNDED_PASS = 2


class VerdictKind(StrEnum):
    HOLDS = "holds"
    VIOLATED = "violated"
    BOUNDED_PASS = "bounded_pass"


class ProofKind(StrEnum):
    SUFFICIENT_CONDITION = "sufficient_condition"
    EXHAUSTIVE_FINITE = "exhaustive_finite"


def format_word(word: Sequence[str]) -> str:
    """Render a string of events; single-character alphabets are concatenated."""
    if not word:
        return "ε"
    if all(len(event) == 1 for event in word):
        return "".join(word)
    return " ".join(word)


def format_words(words: Sequence[Sequence[str]]) -> str:
    return " | ".join(format_word(w) for w in words)


@dataclass(frozen=True)
class Verdict:
    """Outcome of an OC/MOC/LOC check."""

    name: str
    kind: VerdictKind
    proof: ProofKind | None = None
    counterexample: tuple[Word, ...] = ()
    event: str | None = None
    bound: int | None = None
    candidates: int = 0

    @classmethod
    def holds(cls, name: str, proof: ProofKind, *, bound: int | None = None, candidates: int = 0) -> Verdict:
        return cls(name=name, kind=VerdictKind.HOLDS, proof=proof, bound=bound, candidates=candidates)

    @classmethod
    def violated(
        cls,
        name: str,
        counterexample: Sequence[Sequence[str]],
        *,
        event: str | None = None,
        bound: int | None = None,
        candidates: int = 0,
    ) -> Verdict:
        return cls(
            name=name,
            kind=VerdictKind.VIOLATED,
            counterexample=tuple(tuple(w) for w in counterexample),
            event=event,
            bound=bound,
            candidates=candidates,
        )

    @classmethod
    def bounded_pass(cls, name: str, bound: int, *, candidates: int = 0) -> Verdict:
        return cls(name=name, kind=VerdictKind.BOUNDED_PASS, bound=bound, candidates=candidates)

    @property
    def is_holds(self) -> bool:
        return self.kind is VerdictKind.HOLDS

    @property
    def is_violated(self) -> bool:
        return self.kind is VerdictKind.VIOLATED

    @property
    def is_bounded_pass(self) -> bool:
        return self.kind is VerdictKind.BOUNDED_PASS

    @property
    def exit_code(self) -> int:
        if self.kind is VerdictKind.HOLDS:
            return EXIT_HOLDS
        if self.kind is VerdictKind.VIOLATED:
            return EXIT_VIOLATED
        return EXIT_BOUNDED_PASS

    def describe(self) -> str:
        """One-line human-readable summary."""
        if self.kind is VerdictKind.HOLDS:
            reason = "sufficient condition" if self.proof is ProofKind.SUFFICIENT_CONDITION else "exhaustive (finite)"
            return f"{self.name}: holds ({reason})"
        if self.kind is VerdictKind.VIOLATED:
            suffix = f" then {self.event}" if self.event is not None else ""
            return f"{self.name}: violated: {format_words(self.counterexample)}{suffix}"
        return f"{self.name}: no violation up to bound {self.bound} (inconclusive)"


@dataclass(frozen=True)
class CheckResult:
    """Decided property plus a shortest counterexample when it fails."""

    holds: bool
    counterexample: tuple[Word, ...] = ()
    event: str | None = None

    def __bool__(self) -> bool:
        return self.holds

    @classmethod
    def ok(cls) -> CheckResult:
        return cls(holds=True)

    @classmethod
    def failed(cls, *words: Sequence[str], event: str | None = None) -> CheckResult:
        return cls(holds=False, counterexample=tuple(tuple(w) for w in words), event=event)

    @property
    def exit_code(self) -> int:
        return EXIT_HOLDS if self.holds else EXIT_VIOLATED

    def describe(self, name: str) -> str:
        if self.holds:
            return f"{name}: holds"
        suffix = f" then {self.event}" if self.event is not None else ""
        return f"{name}: violated: {format_words(self.counterexample)}{suffix}"
