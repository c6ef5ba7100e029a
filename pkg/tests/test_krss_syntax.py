import pytest
from hypothesis import given, settings

from helpers import concepts
from windkb.errors import ArityError, IllegalCharacter, KRSSTypeError, UnbalancedForm, UnknownHead
from windkb.krss.forms import FormKind, parse_concept, parse_document, parse_form
from windkb.krss.lexer import INT, KEYWORD, REAL, SYMBOL, tokenize
from windkb.krss.printer import pretty, print_document, print_form
from windkb.krss.sexpr import read
from windkb.model import concepts as C
from windkb.model.kb import AttrFiller, GCI, InstanceOf, Related, RoleDecl
from windkb.query import ast as Q


def concept(text):
    return parse_concept(read(tokenize(text)))


def test_tokens_keep_case_prefixes_and_numbers():
    toks = tokenize("(implies geonames:City :transitive 27June -3 4.0 bayesOWL:hasX)")
    kinds = [(t.kind, t.text) for t in toks[1:-1]]
    assert kinds == [
        (SYMBOL, "implies"),
        (SYMBOL, "geonames:City"),
        (KEYWORD, ":transitive"),
        (SYMBOL, "27June"),
        (INT, "-3"),
        (REAL, "4.0"),
        (SYMBOL, "bayesOWL:hasX"),
    ]


def test_comments_are_skipped_and_spans_are_one_based():
    toks = tokenize("; header\n  (a b)")
    assert toks[0].line == 2 and toks[0].col == 3


def test_illegal_character_reports_position():
    with pytest.raises(IllegalCharacter) as e:
        tokenize("(a #b)")
    assert e.value.span.col == 4


@pytest.mark.parametrize(
    "text, expected",
    [
        ("(min speedAverage 16)", C.AttrCmp("speedAverage", ">=", 16)),
        ("(max high 40)", C.AttrCmp("high", "<=", 40)),
        ("(< 7.5 windSpeed)", C.AttrCmp("windSpeed", ">", 7.5)),
        ("(= 595 hasPrice)", C.AttrCmp("hasPrice", "=", 595)),
        ("(>= width 4.0)", C.AttrCmp("width", ">=", 4.0)),
        ("(a hasDistance)", C.HasAttr("hasDistance")),
        ("(no hasDistance)", C.Not(C.HasAttr("hasDistance"))),
        ("top", C.TOP),
        ("*bottom*", C.BOTTOM),
    ],
)
def test_concrete_domain_forms(text, expected):
    assert concept(text) == expected


def test_exact_cardinality_is_at_least_and_at_most():
    c = concept("(=1 hasPart Base)")
    assert c == C.And((C.AtLeast(1, "hasPart", C.Name("Base")), C.AtMost(1, "hasPart", C.Name("Base"))))
    assert concept("(=2 hasObject)") == C.exactly(2, "hasObject")


def test_arithmetic_inside_a_concept_is_rejected_with_a_rule_hint():
    with pytest.raises(KRSSTypeError, match="define-rule"):
        concept("(= windpower (* windspeed windspeed windspeed))")


def test_document_collects_one_diagnostic_per_bad_form():
    text = "(implies A B)\n(implies A)\n(frobnicate x)\n(related a b r)\n(implies (and A B"
    forms, diags = parse_document(text)
    assert [f.kind for f in forms] == [FormKind.TBOX_AXIOM, FormKind.ROLE_ASSERTION]
    kinds = [type(d.error) for d in diags]
    assert kinds == [ArityError, UnknownHead, UnbalancedForm]
    assert diags[0].span.line == 2 and diags[1].span.line == 3 and diags[2].span.line == 5


def test_declaration_keywords_in_any_order():
    a = parse_form("(define-primitive-role isLocated :domain Entity :range Location :transitive t)").payload
    b = parse_form("(define-primitive-role isLocated :transitive t :range Location :domain Entity)").payload
    assert a == b == RoleDecl("isLocated", True, C.Name("Entity"), C.Name("Location"))


def test_misspelled_attribute_declaration_head_is_unknown():
    with pytest.raises(UnknownHead):
        parse_form("(define-concrete-domain-attrbiute speedAverage :domain Location :type integer)")


def test_assertion_forms():
    assert parse_form("(instance wt1 WindTurbine)").payload == InstanceOf("wt1", C.Name("WindTurbine"))
    assert parse_form("(related wt1 p1 isLocated)").payload == Related("wt1", "p1", "isLocated")
    assert parse_form("(attribute-value cp1 0.6 bayesOWL:hasProbabilityValue)").payload == AttrFiller(
        "cp1", 0.6, "bayesOWL:hasProbabilityValue"
    )


def test_rule_with_bare_variable_in_arithmetic():
    rule = parse_form(
        "(define-rule (?wt Proper) (and (?wt ?h1 hasHeight) (?x ?h2 hasHeight) (> ?h1 (+ h2 10))))"
    ).payload
    cmp_atom = rule.body[-1]
    assert isinstance(cmp_atom, Q.Compare)
    assert cmp_atom.right == Q.Arith("+", (Q.Var("?h2"), 10))


def test_rule_head_may_compute_an_attribute():
    rule = parse_form("(define-rule (?x (* ?s ?s ?s) windpower) (?x ?s windspeed))").payload
    assert rule.head == Q.BinaryAtom(Q.Var("?x"), Q.Arith("*", (Q.Var("?s"),) * 3), "windpower")


def test_unsafe_query_is_rejected():
    with pytest.raises(KRSSTypeError, match="DL-safe"):
        parse_form("(retrieve (?x ?y) (?x A))")


def test_variable_predicate_is_rejected():
    with pytest.raises(KRSSTypeError, match="predicate"):
        parse_form("(retrieve (?x) (?x maintains ?y))")


def test_query_forms():
    (f,) = parse_document("(concept-descendents WindTurbine)")[0]
    assert f.payload == Q.ConceptDescendants("WindTurbine")
    q = parse_form("(concept-instances (and WindTurbine (some isLocated Dobrogea)))").payload
    assert q.concept == C.And((C.Name("WindTurbine"), C.Some("isLocated", C.Name("Dobrogea"))))


@settings(max_examples=300, deadline=None)
@given(concepts())
def test_print_then_parse_is_identity(c):
    assert concept(str(c)) == c
    ax = GCI(C.Name("A"), c)
    assert parse_form(print_form(ax)).payload == ax


@settings(max_examples=100, deadline=None)
@given(concepts(max_leaves=12))
def test_pretty_layout_reparses_to_the_same_concept(c):
    assert concept(pretty(str(c), width=30)) == c


def test_document_round_trip():
    text = "(implies A (and B (some r C)))\n(instance i (= a 2.5))\n(related i j r)\n"
    forms, diags = parse_document(text)
    assert not diags
    assert print_document(forms) == text
