import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from helpers import concepts, small_kb
from windkb.fuzz import GenSpec, fuzz_satisfiability, generate_case, judge, shrink
from windkb.loader import load_text
from windkb.model import concepts as C
from windkb.model.kb import GCI, KnowledgeBase, RoleDecl
from windkb.reasoner.module import is_local, module_kb
from windkb.reasoner.oracle import enumerate_satisfiable, oracle_consistent, oracle_satisfiable
from windkb.reasoner.semantics import tbox_violations

A, B = C.Name("A"), C.Name("B")


@pytest.mark.parametrize("profile", ["default", "boolean", "transitive", "integer"])
def test_tableau_and_oracle_agree_on_every_case(profile):
    report = fuzz_satisfiability(GenSpec.profile(profile, seed=42), 500)
    assert report.cases == 500
    assert report.ok, report.disagreements[0].repro
    assert report.agreements == 500


def test_injected_fault_is_caught_and_shrunk():
    spec = GenSpec.profile("transitive", seed=42)
    report = fuzz_satisfiability(spec, 500, faults=("skip_forall_plus",), stop_after=1)
    assert report.disagreements, "fault went unnoticed"
    bad = report.disagreements[0]
    assert not bad.verdict.agrees
    assert not judge(bad.case, spec, ("skip_forall_plus",)).agrees
    assert judge(bad.case, spec).agrees
    # the repro is a loadable file that still carries the failing query
    loaded = load_text(bad.repro)
    assert loaded.ok and len(loaded.queries) == 1
    assert len(list(loaded.kb.axioms)) <= len(list(generate_case(spec, bad.case.index).kb.axioms))


def test_shrink_only_drops_axioms_while_predicate_holds():
    spec = GenSpec.profile("default", seed=7)
    case = next(c for c in (generate_case(spec, i) for i in range(50)) if len(c.kb.axioms) >= 3)
    keep = list(case.kb.axioms)[0]
    small = shrink(case, spec, lambda c: keep in c.kb.axioms)
    assert list(small.kb.axioms) == [keep]


def test_case_generation_is_seeded():
    spec = GenSpec(seed=3)
    assert generate_case(spec, 11).to_krss() == generate_case(spec, 11).to_krss()
    assert generate_case(spec, 11).to_krss() != generate_case(GenSpec(seed=4), 11).to_krss()


def test_oracle_finds_the_smallest_model():
    kb = load_text("(define-primitive-role r)").kb
    c = C.And((A, C.AtLeast(3, "r", C.Not(A))))
    res = oracle_satisfiable(kb, c, max_domain=4)
    assert res.satisfiable and res.domain_size == 4
    assert not oracle_satisfiable(kb, c, max_domain=3).satisfiable


def test_oracle_models_are_checked_directly():
    kb = load_text("(implies A (some r B))\n(implies B (all r A))").kb
    res = oracle_satisfiable(kb, A, max_domain=3)
    assert res.satisfiable
    assert not tbox_violations(res.model, kb)


def test_oracle_consistency_respects_unique_names():
    kb = load_text("(instance i (at-most 1 r))\n(related i j r)\n(related i k r)").kb
    assert not oracle_consistent(kb, max_domain=4).satisfiable


tiny = concepts(max_leaves=3, names=("A",), roles=("r",), attrs=(), card_roles=("r",))


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(tiny, st.lists(st.tuples(st.just(A), tiny).map(lambda p: GCI(*p)), max_size=1))
def test_grounding_agrees_with_plain_enumeration(c, axioms):
    kb = KnowledgeBase()
    kb.add(RoleDecl("r"))
    kb.add_all(axioms)
    assert enumerate_satisfiable(kb, c, max_domain=2) == oracle_satisfiable(kb, c, max_domain=2).satisfiable


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    st.lists(st.tuples(concepts(max_leaves=3, card_roles=("r",)), concepts(max_leaves=3, card_roles=("r",))), max_size=3),
    concepts(max_leaves=3, card_roles=("r",)),
)
def test_locality_module_preserves_satisfiability(pairs, c):
    kb = small_kb()
    kb.add_all(GCI(l, r) for l, r in pairs)
    mod = module_kb(kb, [c])
    assert set(mod.axioms) <= set(kb.axioms)
    assert oracle_satisfiable(mod, c, 3).satisfiable == oracle_satisfiable(kb, c, 3).satisfiable


def test_locality_examples():
    assert is_local(GCI(C.Name("X"), A), {"A"})
    assert not is_local(GCI(A, C.Name("X")), {"A"})
    assert not is_local(GCI(C.TOP, C.Some("r", A)), {"A"})
