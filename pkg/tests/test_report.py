"""Verdict rendering, JSON payloads and the report table."""

from hierarchical_supervisor.hierarchical import abstract_plant, hier_synthesize_normal, workflow_modular
from hierarchical_supervisor.report import check_payload, format_table, report_payload, verdict_payload
from hierarchical_supervisor.testgen import example3_models, railroad_models
from hierarchical_supervisor.verdict import CheckResult, ProofKind, Verdict, format_word


def test_format_word() -> None:
    assert format_word(()) == "ε"
    assert format_word(("a", "b")) == "ab"
    assert format_word(("a_w", "e_w")) == "a_w e_w"


def test_verdict_exit_codes_and_descriptions() -> None:
    holds = Verdict.holds("OC", ProofKind.EXHAUSTIVE_FINITE, bound=4)
    assert holds.exit_code == 0
    assert holds.describe() == "OC: holds (exhaustive (finite))"
    violated = Verdict.violated("MOC", [["c"], ["b", "c"]])
    assert violated.exit_code == 1
    assert violated.counterexample == (("c",), ("b", "c"))
    assert violated.describe() == "MOC: violated: c | bc"
    bounded = Verdict.bounded_pass("LOC", 7)
    assert bounded.exit_code == 2
    assert bounded.describe() == "LOC: no violation up to bound 7 (inconclusive)"


def test_check_result_is_truthy_when_it_holds() -> None:
    assert CheckResult.ok()
    failed = CheckResult.failed(("a",), event="u")
    assert not failed
    assert failed.describe("controllability") == "controllability: violated: a then u"
    assert CheckResult.ok().describe("normality") == "normality: holds"


def test_verdict_payload() -> None:
    payload = verdict_payload(Verdict.violated("MOC", [["c"], ["b", "c"]], bound=6, candidates=9), stats={"states": 3})
    assert payload.model_dump() == {
        "property": "MOC",
        "verdict": "violated",
        "proof": None,
        "bound": 6,
        "counterexample": [["c"], ["b", "c"]],
        "event": None,
        "stats": {"candidates": 9, "states": 3},
    }
    holds = verdict_payload(Verdict.holds("OC", ProofKind.SUFFICIENT_CONDITION))
    assert holds.proof == "sufficient_condition"


def test_check_payload() -> None:
    payload = check_payload("observability", CheckResult.failed(("a",), (), event="b"))
    assert payload.verdict == "violated"
    assert payload.counterexample == [["a"], []]
    assert payload.event == "b"
    assert payload.proof is None


def test_report_payload_and_table_for_example3() -> None:
    g, k, ctx = example3_models()
    report = hier_synthesize_normal(g, k, ctx, verify=True, name="example3")
    payload = report_payload(report)
    assert payload.moc.verdict == "violated"
    assert payload.oc.proof == "exhaustive_finite"
    assert payload.equality_certified is False
    assert payload.equality_witness == ["c"]
    assert payload.choice is None
    assert [s.name for s in payload.statistics][0] == "spec"

    table = format_table(report)
    lines = table.splitlines()
    assert lines[0] == "== example3 =="
    assert lines[1].split() == ["artifact", "states", "transitions", "events"]
    assert "MOC: violated: c | bc" in lines
    assert "nonconflicting: yes" in lines
    assert "equality: refuted (witness c)" in lines


def test_table_withholds_certificate_under_moc_violation() -> None:
    g, _, ctx = example3_models()
    report = hier_synthesize_normal(g, abstract_plant(g, ctx), ctx, verify=True)
    assert report_payload(report).equality_certified is False
    assert "equality: not certified (MOC violated; sides agree)" in format_table(report).splitlines()


def test_table_marks_untested_equality() -> None:
    g, k, ctx = example3_models()
    table = format_table(hier_synthesize_normal(g, k, ctx))
    assert "equality: untested" in table.splitlines()


def test_workflow_report_carries_the_choice() -> None:
    models = railroad_models()
    (report,) = workflow_modular([models.west, models.east], [models.spec], spec_names=["mutex"])
    payload = report_payload(report)
    assert payload.equality_certified is True
    assert payload.choice is not None
    assert payload.choice.plants == ["G1", "G2"]
    table = format_table(report)
    assert "equality: certified" in table
    assert any(line.startswith("workflow: plants G1, G2;") for line in table.splitlines())
