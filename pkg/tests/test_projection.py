"""Projection, composition, observer and local control consistency tests."""

import pytest

from hierarchical_supervisor.automaton import Alphabet, Automaton
from hierarchical_supervisor.errors import AlphabetMismatch, BlockingPlant, DomainViolation, UnknownEvent
from hierarchical_supervisor.language import enumerate_language, from_strings
from hierarchical_supervisor.projection import (
    ProjectionContext,
    check_lcc,
    check_observer,
    extend_observer_lcc,
    inverse_project,
    nonconflicting,
    parallel,
    project,
    project_string,
)
from hierarchical_supervisor.testgen import example1_models


def test_context_derived_sets() -> None:
    _, ctx = example1_models()
    assert ctx.shared == frozenset({"b"})
    assert ctx.low_events == frozenset({"c"})
    assert ctx.sigma_c == frozenset("abc")
    assert ctx.sigma_uc == frozenset()
    high = ctx.high_level_context()
    assert high.sigma.events == ("a", "b")
    assert high.sigma_o == frozenset({"b"})
    assert high.sigma_hi == frozenset({"a", "b"})
    assert ctx.alphabet.observable == frozenset({"b", "c"})


def test_context_rejects_unknown_events() -> None:
    sigma = Alphabet(("a", "b"))
    with pytest.raises(UnknownEvent, match="observable set"):
        ProjectionContext(sigma=sigma, sigma_o=frozenset({"z"}), sigma_hi=frozenset())
    with pytest.raises(UnknownEvent, match="high-level set"):
        ProjectionContext(sigma=sigma, sigma_o=frozenset(), sigma_hi=frozenset({"z"}))


def test_context_from_alphabet_flags_and_overrides() -> None:
    sigma = Alphabet(("a", "b"), observable=frozenset("a"), highlevel=frozenset("b"))
    ctx = ProjectionContext.from_alphabet(sigma)
    assert (ctx.sigma_o, ctx.sigma_hi) == (frozenset("a"), frozenset("b"))
    ctx = ProjectionContext.from_alphabet(sigma, highlevel=["a", "b"], observable=[])
    assert (ctx.sigma_o, ctx.sigma_hi) == (frozenset(), frozenset("ab"))
    assert ctx.with_sets(observable={"b"}).sigma_o == frozenset("b")


def test_project_string_variants() -> None:
    _, ctx = example1_models()
    word = ("a", "c", "b")
    assert project_string(ctx, "P", word) == ("c", "b")
    assert project_string(ctx, "Q", word) == ("a", "b")
    assert project_string(ctx, "P_hi", ("a", "b")) == ("b",)
    assert project_string(ctx, "Q_o", ("c", "b")) == ("b",)
    with pytest.raises(DomainViolation, match="projection P_hi"):
        project_string(ctx, "P_hi", ("c",))
    with pytest.raises(DomainViolation):
        project_string(ctx, "Q_o", ("a",))


def test_project_automaton() -> None:
    l, ctx = example1_models()
    q = project(l, ctx.sigma_hi)
    assert q.alphabet.events == ("a", "b")
    assert q.deterministic
    assert enumerate_language(q, 3).as_set() == {(), ("a",), ("b",), ("a", "b")}
    with pytest.raises(UnknownEvent):
        project(l, {"a", "z"})
    with pytest.raises(AlphabetMismatch):
        project(l, {"a"}, alphabet=Alphabet(("a", "b")))


def test_inverse_project_adds_self_loops() -> None:
    a = from_strings([("a",)], Alphabet(("a",)))
    lifted = inverse_project(a, Alphabet(("a", "b")))
    language = enumerate_language(lifted, 3).as_set()
    assert ("b", "a", "b") in language
    assert ("a",) in language
    assert ("b",) not in language
    with pytest.raises(AlphabetMismatch):
        inverse_project(lifted, Alphabet(("a",)))


def test_parallel_synchronizes_shared_events() -> None:
    left = from_strings([("a", "s")], Alphabet(("a", "s")))
    right = from_strings([("b", "s")], Alphabet(("b", "s")))
    joint = parallel([left, right])
    assert joint.alphabet.events == ("a", "s", "b")
    assert enumerate_language(joint, 4).as_set() == {("a", "b", "s"), ("b", "a", "s")}
    assert parallel([left]) is left
    with pytest.raises(ValueError, match="at least one"):
        parallel([])


def test_nonconflicting() -> None:
    sigma = Alphabet(("a", "b"))
    ab = from_strings([("a", "b")], sigma)
    ba = from_strings([("b", "a")], sigma)
    assert not nonconflicting([ab, ba])
    assert nonconflicting([ab, ab])
    assert nonconflicting([ab])


def _observer_plant() -> tuple[Automaton, ProjectionContext]:
    sigma = Alphabet(("a", "b", "c"))
    g = from_strings([("a", "b"), ("c",)], sigma)
    return g, ProjectionContext(sigma=sigma, sigma_o=frozenset(), sigma_hi=frozenset({"b", "c"}))


def test_observer_failure_is_reported_with_witness() -> None:
    g, ctx = _observer_plant()
    result = check_observer(g, ctx)
    assert not result
    assert result.counterexample == (("a",), ("c",))


def test_observer_holds_when_everything_is_high_level() -> None:
    g, ctx = _observer_plant()
    assert check_observer(g, ctx.with_sets(highlevel={"a", "b", "c"}))


def test_observer_rejects_blocking_plant() -> None:
    sigma = Alphabet(("a",))
    g = Automaton.build(("p", "q"), sigma, [("p", "a", "q")], "p", ["p"])
    ctx = ProjectionContext(sigma=sigma, sigma_o=frozenset(), sigma_hi=frozenset())
    with pytest.raises(BlockingPlant, match="'q'"):
        check_observer(g, ctx)


def test_lcc_needs_uncontrollable_low_path() -> None:
    sigma = Alphabet(("c", "e"), controllable=frozenset({"c"}))
    g = from_strings([("c", "e")], sigma)
    ctx = ProjectionContext(sigma=sigma, sigma_o=frozenset(), sigma_hi=frozenset({"e"}))
    result = check_lcc(g, ctx)
    assert not result
    assert result.counterexample == ((),)
    assert result.event == "e"

    relaxed = ProjectionContext(sigma=Alphabet(("c", "e")), sigma_o=frozenset(), sigma_hi=frozenset({"e"}))
    assert check_lcc(from_strings([("c", "e")], relaxed.sigma), relaxed)


def test_lcc_holds_when_high_events_are_controllable() -> None:
    sigma = Alphabet(("c", "e"), controllable=frozenset({"c", "e"}))
    ctx = ProjectionContext(sigma=sigma, sigma_o=frozenset(), sigma_hi=frozenset({"e"}))
    assert check_lcc(from_strings([("c", "e")], sigma), ctx)


def test_extend_observer_lcc_adds_the_missing_low_event() -> None:
    g, _ = _observer_plant()
    assert extend_observer_lcc(g, ["c", "b"]) == ("b", "c", "a")
    assert extend_observer_lcc(g, ["a", "b", "c"]) == ("a", "b", "c")
