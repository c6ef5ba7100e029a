import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from helpers import concepts, small_kb
from windkb.errors import UnknownIndividual, UnsupportedAxiom
from windkb.krss.forms import parse_form
from windkb.loader import load_text
from windkb.model import concepts as C
from windkb.model.kb import GCI, InstanceOf, Related
from windkb.reasoner.oracle import oracle_consistent, oracle_satisfiable
from windkb.reasoner.semantics import abox_violations, tbox_violations
from windkb.reasoner.tableau import Reasoner

A, B, Cn = C.Name("A"), C.Name("B"), C.Name("C")


def concept(text):
    return parse_form(f"(concept-satisfiable? {text})").payload.concept


def reasoner(text=""):
    return Reasoner(load_text(text).kb)


@pytest.mark.parametrize(
    "tbox, query, sat",
    [
        ("", "(and A (not A))", False),
        ("", "(and (some r A) (all r (not A)))", False),
        ("", "(and (at-least 3 r) (at-most 2 r))", False),
        ("", "(and (at-least 2 r A) (at-most 1 r))", False),
        ("", "(and (some r A) (some r B) (at-most 1 r))", True),
        ("(disjoint A B)", "(and (some r A) (some r B) (at-most 1 r))", False),
        ("(define-primitive-role s :transitive t)", "(and (some s (some s A)) (all s (not A)))", False),
        ("(define-primitive-role r)", "(and (some r (some r A)) (all r (not A)))", True),
        ("", "(and (> a 2) (< a 3))", True),
        ("(define-concrete-domain-attribute a :type integer)", "(and (> a 2) (< a 3))", False),
        ("", "(and (= a 1) (no a))", False),
        ("(implies A (some r A))", "A", True),
        ("(implies top (some r top))\n(implies A (all r B))\n(disjoint A B)", "(and A (some r A))", False),
    ],
)
def test_satisfiability_examples(tbox, query, sat):
    r = reasoner(tbox)
    assert r.is_satisfiable(concept(query)) is sat


def test_unsatisfiable_concept_reports_a_clash():
    r = reasoner("(implies A B)\n(disjoint A B)")
    report = r.unsat_reason(A)
    assert report is not None and report.node


def test_number_restriction_on_transitive_role_is_rejected():
    kb = load_text("(define-primitive-role hasPart :transitive t)\n(implies W (=1 hasPart Base))").kb
    with pytest.raises(UnsupportedAxiom, match="hasDirectPart"):
        Reasoner(kb)
    r = Reasoner(kb, skip_unsupported=True)
    assert len(r.rejected_axioms) == 1


def test_subsumption_through_transitivity():
    r = reasoner("(define-primitive-role s :transitive t)\n(implies A (all s B))")
    assert r.subsumes(concept("(all s (all s B))"), A)
    assert not r.subsumes(concept("(all s (all s B))"), B)


def test_coherence_report_separates_root_causes():
    r = reasoner("(implies (or P Q) L)\n(disjoint Q L)\n(implies I Q)")
    rep = r.tbox_coherent()
    assert not rep.coherent
    assert rep.unsatisfiable == ["Q"]
    assert rep.all_unsatisfiable == ["I", "Q"]


def test_classification_is_the_same_in_parallel():
    text = "\n".join(
        [
            "(implies (or A1 A2 A3) A)",
            "(implies A B)",
            "(equivalent D (and A (some r B)))",
            "(implies E (and A1 (some r A2)))",
            "(disjoint A1 A2)",
        ]
    )
    serial = reasoner(text).classify(1)
    parallel = reasoner(text).classify(3)
    assert serial.classes == parallel.classes and serial.parents == parallel.parents
    assert serial.direct_parents("E") == ["A1", "D"]
    assert serial.descendants("A") == ["A1", "A2", "A3", "D", "E"]


def test_abox_consistency_and_una():
    r = reasoner("(instance i (at-most 1 r))\n(related i j r)\n(related i k r)")
    assert not r.abox_consistent().consistent
    r = reasoner("(instance i (at-most 1 r))\n(related i j r)")
    assert r.abox_consistent().consistent


def test_instances_use_refutation():
    r = reasoner(
        "(define-primitive-role s :transitive t)\n(related a b s)\n(related b c s)\n(instance c C)\n(instance d (some s C))"
    )
    assert r.instances(concept("(some s C)")) == ["a", "b", "d"]
    assert r.instance_of("a", concept("(some s C)"))
    with pytest.raises(UnknownIndividual):
        r.instance_of("zz", A)


def test_types_of_matches_instance_checks():
    r = reasoner("(implies A B)\n(instance x A)\n(instance y (or A B))")
    assert r.types_of("x", ["A", "B", "C"]) == ["A", "B"]
    assert r.types_of("y", ["A", "B", "C"]) == ["B"]


# ------------------------------------------------------------ against the oracle


def _judge(kb, c):
    ok, model = Reasoner(kb).satisfiable_with_witness(c)
    if ok:
        # the witness must be a genuine model of the TBox containing c
        assert model.extension(c), "empty witness"
        assert not tbox_violations(model, kb), "witness violates the TBox"
    else:
        assert not oracle_satisfiable(kb, c, max_domain=4).satisfiable, "oracle found a model"
    return ok


tboxes = st.lists(
    st.tuples(st.sampled_from([A, B, Cn]), concepts(max_leaves=4, card_roles=("r",))).map(lambda p: GCI(*p)),
    max_size=2,
)


@settings(max_examples=250, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(tboxes, concepts(max_leaves=6, card_roles=("r",)))
def test_tableau_agrees_with_the_finite_model_oracle(axioms, c):
    kb = small_kb()
    kb.add_all(axioms)
    _judge(kb, c)


@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    st.lists(
        st.one_of(
            st.builds(InstanceOf, st.sampled_from(["i", "j"]), concepts(max_leaves=4, card_roles=("r",))),
            st.builds(Related, st.sampled_from(["i", "j"]), st.sampled_from(["i", "j"]), st.sampled_from(["r", "s"])),
        ),
        min_size=1,
        max_size=3,
    ),
    concepts(max_leaves=3, card_roles=("r",)),
)
def test_instance_checks_agree_with_oracle_refutation(assertions, query):
    kb = small_kb()
    kb.add_all(assertions)
    r = Reasoner(kb)
    res = r.abox_consistent()
    oracle = oracle_consistent(kb, max_domain=5)
    if res.consistent:
        assert not abox_violations(res.witness, kb.abox) and not tbox_violations(res.witness, kb)
    else:
        assert not oracle.satisfiable
        return
    for ind in kb.individuals():
        entailed = r.instance_of(ind, query)
        refuted = oracle_consistent(kb, max_domain=5, assertions=list(kb.abox) + [InstanceOf(ind, C.Not(query))])
        if entailed:
            assert not refuted.satisfiable
        elif not refuted.satisfiable:
            # the tableau's counter-model may need more elements than the oracle tried
            probe = kb.copy()
            probe.add(InstanceOf(ind, C.Not(query)))
            w = Reasoner(probe).abox_consistent()
            assert w.consistent and not abox_violations(w.witness, probe.abox)
