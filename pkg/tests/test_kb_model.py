import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ATTRS, NAMES, ROLES, concepts
from windkb.errors import ConflictingDeclaration, NonSafeRule, UndeclaredSymbol, ValueTypeError
from windkb.krss.forms import parse_form
from windkb.loader import load_text
from windkb.model import concepts as C
from windkb.model.kb import INTEGER, AttrFiller, AttributeDecl, InstanceOf, KnowledgeBase, Related, RoleDecl
from windkb.model.tbox import internalize, tbox_cyclic
from windkb.reasoner.semantics import Interpretation


@st.composite
def interpretations(draw, max_size=3):
    n = draw(st.integers(1, max_size))
    dom = list(range(n))
    subset = st.sets(st.sampled_from(dom))
    pairs = st.sets(st.tuples(st.sampled_from(dom), st.sampled_from(dom)))
    values = st.dictionaries(st.sampled_from(dom), st.sampled_from([-1, 0, 0.5, 1, 2, 2.5, 3]))
    return Interpretation(
        n,
        concepts={a: draw(subset) for a in NAMES},
        roles={r: draw(pairs) for r in ROLES},
        attributes={a: draw(values) for a in ATTRS},
    )


@settings(max_examples=400, deadline=None)
@given(concepts(), interpretations())
def test_nnf_preserves_extension(c, interp):
    n = C.nnf(c)
    assert C.is_nnf(n)
    assert interp.extension(n) == interp.extension(c)


@settings(max_examples=300, deadline=None)
@given(concepts(), interpretations())
def test_negate_is_complement(c, interp):
    assert interp.extension(C.negate(c)) == frozenset(interp.domain) - interp.extension(c)


@settings(max_examples=200, deadline=None)
@given(concepts())
def test_nnf_is_idempotent(c):
    assert C.nnf(C.nnf(c)) == C.nnf(c)


def test_de_morgan():
    a, b = C.Name("A"), C.Name("B")
    assert C.nnf(C.Not(C.And((a, b)))) == C.Or((C.Not(a), C.Not(b)))


def test_negated_comparison_allows_a_missing_value():
    neg = C.negate(C.AttrCmp("a", "=", 1))
    assert neg == C.Or((C.Not(C.HasAttr("a")), C.AttrCmp("a", "<", 1), C.AttrCmp("a", ">", 1)))


def test_concept_invariants():
    with pytest.raises(ValueError):
        C.AtLeast(-1, "r")
    with pytest.raises(ValueError):
        C.And(())
    with pytest.raises(ValueError):
        C.AttrCmp("a", "<", float("nan"))


def test_undeclared_symbols_are_auto_declared_with_a_warning():
    kb = KnowledgeBase()
    kb.add(parse_form("(implies A (some r B))").payload)
    kb.add(AttrFiller("i", 2.5, "a"))
    assert kb.roles["r"] == RoleDecl("r") and kb.attributes["a"].value_type == "real"
    assert len(kb.warnings) == 2


def test_strict_mode_rejects_undeclared_symbols():
    kb = KnowledgeBase(strict=True)
    with pytest.raises(UndeclaredSymbol):
        kb.add(Related("i", "j", "r"))


def test_a_later_declaration_replaces_the_automatic_one():
    kb = KnowledgeBase()
    kb.add(Related("i", "j", "r"))
    kb.add(RoleDecl("r", transitive=True))
    assert kb.transitive_roles() == frozenset({"r"})
    with pytest.raises(ConflictingDeclaration):
        kb.add(RoleDecl("r"))


def test_role_and_attribute_namespaces_do_not_mix():
    kb = KnowledgeBase()
    kb.add(RoleDecl("r"))
    with pytest.raises(ConflictingDeclaration):
        kb.add(AttributeDecl("r"))


def test_integer_attribute_rejects_real_fillers():
    kb = KnowledgeBase()
    kb.add(AttributeDecl("speedAverage", None, INTEGER))
    kb.add(AttrFiller("x", 16, "speedAverage"))
    with pytest.raises(ValueTypeError):
        kb.add(AttrFiller("y", 16.5, "speedAverage"))


def test_init_abox_switches_the_active_abox():
    loaded = load_text("(instance a A)\n(init-abox region)\n(instance b B)")
    kb = loaded.kb
    assert kb.active_abox == "region"
    assert kb.individuals() == ["b"]
    assert InstanceOf("a", C.Name("A")) in kb.aboxes["default"]


def test_unsafe_rule_is_rejected_when_added():
    from windkb.query import ast as Q

    rule = Q.RuleDef(Q.ConceptAtom(Q.Var("?y"), C.Name("B")), (Q.ConceptAtom(Q.Var("?x"), C.Name("A")),))
    with pytest.raises(NonSafeRule):
        KnowledgeBase().add(rule)


def test_loader_turns_model_errors_into_diagnostics():
    loaded = load_text("(define-primitive-role r)\n(define-concrete-domain-attribute r)\n(instance a A)")
    assert [d.kind for d in loaded.diagnostics] == ["ConflictingDeclaration"]
    assert loaded.kb.individuals() == ["a"]


def test_cycle_detection_and_lazy_unfolding():
    kb = load_text("(equivalent A (and B (some r C)))\n(implies B D)").kb
    assert not tbox_cyclic(kb)
    tb = internalize(kb)
    assert "A" in tb.definitions and not tb.global_conjuncts
    cyclic = load_text("(equivalent A (some r A))").kb
    assert tbox_cyclic(cyclic)


def test_gci_with_complex_left_side_becomes_a_role_trigger():
    kb = load_text("(implies (some r B) C)").kb
    tb = internalize(kb)
    assert not tb.global_conjuncts
    assert tb.role_triggers["r"] == (C.Or((C.All("r", C.Not(C.Name("B"))), C.Name("C"))),)
