from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from windkb.loader import load_text
from windkb.model.kb import AttrFiller, InstanceOf, Related
from windkb.model import concepts as C
from windkb.query.rules import apply_rules, exact, materialize, transitive_closure_facts

CUBE = """
(define-concrete-domain-attribute windspeed)
(define-concrete-domain-attribute windpower)
(define-rule (?x (* ?s ?s ?s) windpower) (?x ?s windspeed))
"""


def fillers(kb, attr):
    return {a.individual: a.value for a in kb.abox if isinstance(a, AttrFiller) and a.attribute == attr}


def test_cube_law_is_exact():
    kb = load_text(CUBE + "(instance w1 (= windspeed 10.0))\n(instance w0 (= windspeed 0))\n(instance w2 (= windspeed 0.1))").kb
    out, m = materialize(kb)
    power = fillers(out, "windpower")
    assert power["w1"] == 1000.0
    assert power["w0"] == 0
    # exact arithmetic: 0.1 is taken as the decimal it was written as
    assert exact(power["w2"]) == Fraction(1, 1000)
    assert not m.conflicts


def test_cube_law_from_attribute_filler_form():
    kb = load_text(CUBE + "(attribute-filler w1 10 windspeed)").kb
    assert fillers(materialize(kb)[0], "windpower") == {"w1": 1000.0}


def test_told_value_that_disagrees_is_a_conflict():
    kb = load_text(CUBE + "(attribute-filler w1 2 windspeed)\n(attribute-filler w1 9 windpower)").kb
    out, m = materialize(kb)
    assert len(m.conflicts) == 1 and "w1.windpower" in str(m.conflicts[0])
    assert fillers(out, "windpower") == {"w1": 9}


def test_proper_turbine_rule_uses_the_hierarchy():
    kb = load_text(
        """
(define-primitive-role isLocated :transitive t)
(define-concrete-domain-attribute speedAverage)
(implies SmallTurbine Turbine)
(define-rule (?x ProperTurbine) (and (?x Turbine) (?x ?l isLocated) (?l ?v speedAverage) (>= ?v 6)))
(instance t1 SmallTurbine)
(related t1 p1 isLocated)
(related p1 r1 isLocated)
(instance r1 (= speedAverage 7))
(instance t2 Turbine)
(related t2 p2 isLocated)
(instance p2 (= speedAverage 5))
"""
    ).kb
    out, _ = materialize(kb)
    proper = {
        a.individual for a in out.abox if isinstance(a, InstanceOf) and a.concept == C.Name("ProperTurbine")
    }
    assert proper == {"t1"}


def test_materialization_is_a_fixpoint():
    kb = load_text(CUBE + "(define-rule (?x Fast) (and (?x ?p windpower) (> ?p 100)))\n(attribute-filler w 5 windspeed)").kb
    once, m1 = materialize(kb)
    twice, m2 = materialize(once)
    assert m1.added and not m2.added
    assert set(once.abox) == set(twice.abox)
    assert not apply_rules(once).added


edges = st.lists(st.tuples(st.sampled_from("abcde"), st.sampled_from("abcde")), max_size=10)


@settings(max_examples=150, deadline=None)
@given(edges, st.randoms(use_true_random=False))
def test_transitive_closure_is_order_independent_and_idempotent(pairs, rnd):
    def build(ps):
        kb = load_text("(define-primitive-role s :transitive t)").kb
        kb.add_all(Related(x, y, "s") for x, y in ps)
        return kb

    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    a, _ = materialize(build(pairs))
    b, _ = materialize(build(shuffled))
    assert set(a.abox) == set(b.abox)
    assert transitive_closure_facts(a) == []
    rel = {(r.subject, r.object) for r in a.abox}
    for x, y in rel:
        for y2, z in rel:
            if y == y2:
                assert (x, z) in rel


def test_non_transitive_roles_are_left_alone():
    kb = load_text("(define-primitive-role r)\n(related a b r)\n(related b c r)").kb
    assert transitive_closure_facts(kb) == []
