"""Generators, the hardness gadget and the definition-level oracles."""

import itertools
from pathlib import Path

import pytest
import tomllib

from hierarchical_supervisor.automaton import Alphabet, Automaton
from hierarchical_supervisor.des_format import load_des, serialize_des
from hierarchical_supervisor.errors import DuplicateName, UnmarkedState
from hierarchical_supervisor.language import closed, enumerate_language, from_strings, longest_path_length, member
from hierarchical_supervisor.params import ProfileName
from hierarchical_supervisor.projection import ProjectionContext, project_string
from hierarchical_supervisor.relational import check_moc, sufficient_moc
from hierarchical_supervisor.synthesis import SpecPlantPair
from hierarchical_supervisor.testgen import (
    GADGET_HIGH,
    GADGET_OBSERVED,
    brute_loc,
    brute_moc,
    brute_oc,
    brute_sup_normal,
    brute_supremal,
    derived_seed,
    example1_models,
    example3_models,
    nfa_universal,
    pspace_gadget,
    random_instance,
    random_instances,
    random_nfa,
    random_sublanguage,
    shortest_rejected,
    write_instance,
)

ONE_LETTER = Alphabet(("a",))


def _short_nfa() -> Automaton:
    return Automaton.build(("p0", "p1"), ONE_LETTER, [("p0", "a", "p1")], "p0", ["p0", "p1"])


def _universal_nfa() -> Automaton:
    return Automaton.build(("p0",), ONE_LETTER, [("p0", "a", "p0")], "p0", ["p0"])


def test_universality_helpers() -> None:
    assert shortest_rejected(_short_nfa()) == ("a", "a")
    assert not nfa_universal(_short_nfa())
    assert nfa_universal(_universal_nfa())
    with pytest.raises(UnmarkedState):
        nfa_universal(Automaton.build(("p0",), ONE_LETTER, [], "p0", []))


def test_gadget_alphabet_roles() -> None:
    b, ctx = pspace_gadget(_universal_nfa())
    assert b.alphabet.events == ("a", "x0_a_0", GADGET_OBSERVED, GADGET_HIGH)
    assert ctx.sigma_o == frozenset({"a", GADGET_OBSERVED})
    assert ctx.sigma_hi == frozenset({"a", GADGET_HIGH})
    assert not sufficient_moc(ctx)


def test_gadget_of_a_non_universal_nfa_violates_moc() -> None:
    b, ctx = pspace_gadget(_short_nfa())
    fast = check_moc(b, ctx, bound=8, use_sufficient_condition=False)
    assert fast.is_violated
    slow = brute_moc(b, ctx, 5, witness_depth=6)
    assert slow.counterexample == ((GADGET_HIGH, "x0_a_1", "a", "x0_a_1", "a"), ("a", "a"))
    _, t2 = slow.counterexample
    assert project_string(ctx, "P_hi", t2) == ("a", "a")


def test_gadget_of_a_universal_nfa_passes() -> None:
    b, ctx = pspace_gadget(_universal_nfa())
    assert check_moc(b, ctx, bound=6, use_sufficient_condition=False).is_bounded_pass
    assert not brute_moc(b, ctx, 5, witness_depth=6).is_violated


def test_gadget_allows_high_marker_only_right_after_observed_marker() -> None:
    b, _ = pspace_gadget(_universal_nfa())
    assert member(b, (GADGET_OBSERVED, GADGET_HIGH, "x0_a_0", "a"))
    assert member(b, (GADGET_OBSERVED, "x0_a_0", "a", "x0_a_0", "a"))
    assert not member(closed(b), (GADGET_OBSERVED, "x0_a_0", "a", GADGET_HIGH))
    assert member(b, ("x0_a_0",))


def test_gadget_of_an_nfa_without_transitions_violates_moc() -> None:
    epsilon_only = Automaton.build(("p0",), ONE_LETTER, [], "p0", ["p0"])
    assert not nfa_universal(epsilon_only)
    b, ctx = pspace_gadget(epsilon_only)
    assert b.alphabet.events == ("a", "x_a", GADGET_OBSERVED, GADGET_HIGH)
    verdict = brute_moc(b, ctx, 3, witness_depth=4)
    assert verdict.counterexample == ((GADGET_HIGH, "x_a", "a"), ("a",))
    assert check_moc(b, ctx, bound=6, use_sufficient_condition=False).is_violated


def test_gadget_preconditions() -> None:
    with pytest.raises(UnmarkedState):
        pspace_gadget(Automaton.build(("p0", "p1"), ONE_LETTER, [("p0", "a", "p1")], "p0", ["p0"]))
    reserved = Automaton.build(("p0",), Alphabet(("a", GADGET_OBSERVED)), [], "p0", ["p0"])
    with pytest.raises(DuplicateName, match="'@'"):
        pspace_gadget(reserved)


def test_gadget_decides_universality() -> None:
    for seed in range(200):
        a = random_nfa(seed)
        rejected = shortest_rejected(a)
        # a violation needs #x1a1...xkak for the shortest rejected a1...ak
        depth = 2 * len(rejected) + 1 if rejected is not None else 5
        b, ctx = pspace_gadget(a)
        verdict = brute_moc(b, ctx, depth, witness_depth=depth + 1)
        assert verdict.is_violated == (rejected is not None), seed
        if verdict.is_violated:
            _, t2 = verdict.counterexample
            assert not member(a, project_string(ctx, "P_hi", t2)), seed


def test_random_nfa_is_reproducible_and_fully_marked() -> None:
    a = random_nfa(17)
    assert serialize_des(a) == serialize_des(random_nfa(17))
    assert a.marked == frozenset(a.states)
    assert a.num_events <= 2


def test_brute_oracles_on_worked_examples() -> None:
    l, ctx = example1_models()
    assert brute_oc(l, ctx, 2).counterexample == (("a", "b"), ("b",))

    plant, _, ctx3 = example3_models()
    assert not brute_oc(plant, ctx3, 3).is_violated
    assert brute_moc(plant, ctx3, 3).counterexample == (("c",), ("b", "c"))

    sigma = Alphabet(("a", "b", "e"), controllable=frozenset({"e"}))
    loc_ctx = ProjectionContext(sigma=sigma, sigma_o=frozenset(), sigma_hi=frozenset({"e"}))
    verdict = brute_loc(closed(from_strings([("a", "e"), ("b",)], sigma)), loc_ctx, 2)
    assert verdict.counterexample == ((), ("b",))
    assert verdict.event == "e"


def test_brute_oracles_report_bounded_pass_on_cyclic_languages() -> None:
    sigma = Alphabet(("a", "b"))
    loop = Automaton.build(("p",), sigma, [("p", "a", "p"), ("p", "b", "p")], "p", ["p"])
    ctx = ProjectionContext(sigma=sigma, sigma_o=frozenset({"a"}), sigma_hi=frozenset({"b"}))
    assert brute_moc(loop, ctx, 3, witness_depth=6).is_bounded_pass
    with pytest.raises(ValueError, match="depth"):
        brute_oc(loop, ctx, -1)


def test_brute_supremal_on_example3() -> None:
    g, k, ctx = example3_models()
    lifted = SpecPlantPair(spec=k, plant=g, ctx=ctx).lifted()
    assert brute_sup_normal(lifted, g, ctx, 3) == {(), ("a",), ("b",), ("c",), ("b", "a")}


def test_brute_supremal_limits() -> None:
    sigma = Alphabet(("a", "b"))
    full = closed(from_strings(list(itertools.product(sigma.events, repeat=3)), sigma))
    ctx = ProjectionContext(sigma=sigma, sigma_o=frozenset(), sigma_hi=frozenset())
    with pytest.raises(ValueError, match="at most 14 strings"):
        brute_supremal(full, full, ctx, 3)
    loop = Automaton.build(("p",), sigma, [("p", "a", "p")], "p", ["p"])
    with pytest.raises(ValueError, match="finite within depth 3"):
        brute_supremal(loop, loop, ctx, 3)


def test_random_instance_is_reproducible() -> None:
    first = random_instance(5)
    second = random_instance(5)
    assert serialize_des(first.plant) == serialize_des(second.plant)
    assert serialize_des(first.spec) == serialize_des(second.spec)
    assert first.ctx == second.ctx
    seeds = [instance.seed for instance in random_instances(3, 4)]
    assert seeds == [derived_seed(3, i) for i in range(4)]


def test_random_profiles() -> None:
    for instance in random_instances(1, 20, ProfileName.MOC_BY_CONSTRUCTION):
        assert sufficient_moc(instance.ctx), instance.seed
    for instance in random_instances(2, 20, ProfileName.ACYCLIC_SMALL):
        assert longest_path_length(instance.plant) is not None, instance.seed
        assert instance.plant.num_states <= 12
    for instance in random_instances(3, 20, prefix_closed=True):
        assert instance.plant.marked == frozenset(instance.plant.states), instance.seed
        assert instance.spec.alphabet.event_set == instance.ctx.sigma_hi


def test_random_sublanguage_stays_inside() -> None:
    plant, _, _ = example3_models()
    sub = random_sublanguage(plant, 9, depth=3, max_strings=4)
    chosen = enumerate_language(sub, 3).as_set()
    assert len(chosen) <= 4
    assert chosen <= enumerate_language(plant, 3).as_set()


def test_write_instance(tmp_path: Path) -> None:
    instance = random_instance(4, ProfileName.ACYCLIC_SMALL)
    manifest = write_instance(instance, tmp_path / "instance")
    data = tomllib.loads(manifest.read_text(encoding="utf-8"))
    assert data["instance"] == {"seed": 4, "profile": "acyclic-small"}
    assert data["files"] == {"plant": "plant.des", "spec": "spec.des"}
    assert serialize_des(load_des(manifest.parent / "plant.des")) == serialize_des(instance.plant)
