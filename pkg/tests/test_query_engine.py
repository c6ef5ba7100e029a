import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from helpers import concepts, small_kb
from windkb.corpus import load_corpus
from windkb.errors import UnknownIndividual
from windkb.krss.forms import parse_form
from windkb.loader import load_text
from windkb.model import concepts as C
from windkb.model.kb import InstanceOf, Related
from windkb.query.engine import QueryEngine, UnknownConcept
from windkb.reasoner.oracle import oracle_consistent


@pytest.fixture(scope="module")
def engine():
    return QueryEngine(load_corpus().kb)


def ask(engine, text):
    return engine.answer(parse_form(text).payload).value


def test_transitivity_reaches_the_region(engine):
    assert ask(engine, "(concept-instances (and WindTurbine (some isLocated Dobrogea)))") == ["wt1", "wt2"]
    d = engine.describe_individual("wt1")
    assert ("isLocated", "Romania", True) in d.roles
    assert ("isLocated", "p1", False) in d.roles


def test_corpus_query_file(engine):
    loaded = load_corpus()
    answers = engine.answer_all(loaded.queries)
    assert [a.value for a in answers[:3]] == [False, True, True]
    assert answers[4].value == ["SmallWindTurbine"]
    assert "SmallWindTurbine" in answers[5].value


def test_describe_lists_attribute_values(engine):
    d = engine.describe_individual("p1")
    assert ("windSpeed", "8.2", "told") in d.attributes
    assert "PromisingPotentialat50" in d.inferred
    assert json.loads(engine.answer(parse_form("(describe-individual p1)").payload).json())["answer"]["individual"] == "p1"


def test_most_specific_types_are_instance_checks(engine):
    types = engine.most_specific_types("wt2")
    assert types == ["SmallWindTurbine"]
    assert engine.reasoner.instance_of("wt2", C.Name("WindTurbine"))
    for t in types:
        assert engine.reasoner.instance_of("wt2", C.Name(t))


def test_unknown_names(engine):
    with pytest.raises(UnknownConcept):
        ask(engine, "(concept-children NoSuchThing)")
    with pytest.raises(UnknownIndividual):
        ask(engine, "(describe-individual nobody)")
    with pytest.raises(UnknownIndividual):
        ask(engine, "(individual-instance? nobody WindTurbine)")


def test_conjunctive_retrieval_with_arithmetic():
    eng = QueryEngine(
        load_text(
            """
(define-concrete-domain-attribute v)
(attribute-filler a 3 v)
(attribute-filler b 5 v)
(instance a K)
"""
        ).kb
    )
    q = parse_form("(retrieve (?x ?y) (and (?x ?y v) (> (* ?y 2) 7)))").payload
    assert eng.retrieve(q) == [{"?x": "b", "?y": "5"}]


def test_inconsistent_abox_answers_everything():
    eng = QueryEngine(load_text("(disjoint A B)\n(instance i A)\n(instance i B)\n(instance j C)").kb)
    assert not eng.consistent()
    assert eng.concept_instances(C.Name("C")) == ["i", "j"]


@settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    st.lists(st.builds(InstanceOf, st.sampled_from(["i", "j"]), concepts(max_leaves=3, card_roles=("r",))), min_size=1, max_size=2),
    st.lists(st.builds(Related, st.sampled_from(["i", "j"]), st.sampled_from(["i", "j"]), st.sampled_from(["r", "s"])), max_size=2),
    concepts(max_leaves=3, card_roles=("r",)),
)
def test_instances_are_certain_answers(types, edges, query):
    kb = small_kb()
    kb.add_all(types + edges)
    eng = QueryEngine(kb)
    if not eng.consistent():
        return
    answers = eng.concept_instances(query)
    for ind in kb.individuals():
        if ind in answers:
            # no finite counter-model may exist
            probe = list(eng.kb.abox) + [InstanceOf(ind, C.Not(query))]
            assert not oracle_consistent(eng.kb, max_domain=5, assertions=probe).satisfiable
