"""DL-safe forward chaining over named individuals.

Body atoms only ever bind variables to individuals of the active ABox or to
told attribute values, so every rule set reaches a fixpoint.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

from ..errors import ValueTypeError
from ..model.concepts import AttrCmp, And, Concept, Top, format_number
from ..model.kb import INTEGER, AttrFiller, InstanceOf, KnowledgeBase, Related
from ..reasoner.semantics import close_transitive
from .ast import Arith, BinaryAtom, Compare, ConceptAtom, RuleDef, Var

log = logging.getLogger(__name__)

TOLERANCE = 1e-9
Value = Union[str, Fraction]
Fact = Union[InstanceOf, Related, AttrFiller]


def exact(v) -> Fraction:
    """Decimal reading of a number: 0.1 is 1/10, not the nearest double."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(repr(float(v)))


def close_enough(a: Fraction, b: Fraction) -> bool:
    scale = max(1, abs(a), abs(b))
    return abs(a - b) <= Fraction(TOLERANCE) * scale


def compare(a: Fraction, op: str, b: Fraction) -> bool:
    eq = close_enough(a, b)
    if op == "=":
        return eq
    if op == "<":
        return a < b and not eq
    if op == ">":
        return a > b and not eq
    if op == "<=":
        return a < b or eq
    if op == ">=":
        return a > b or eq
    raise ValueError(f"unknown comparison {op}")


def told_values(kb: KnowledgeBase) -> dict[tuple[str, str], list[Fraction]]:
    """(individual, attribute) -> asserted values.

    Values come from attribute fillers and from ``=`` comparisons that occur
    as top-level conjuncts of concept assertions.
    """
    out: dict[tuple[str, str], list[Fraction]] = {}

    def put(ind, attr, v):
        vals = out.setdefault((ind, attr), [])
        x = exact(v)
        if not any(close_enough(x, y) for y in vals):
            vals.append(x)

    for a in kb.abox:
        if isinstance(a, AttrFiller):
            put(a.individual, a.attribute, a.value)
        elif isinstance(a, InstanceOf):
            for c in conjuncts(a.concept):
                if isinstance(c, AttrCmp) and c.op == "=":
                    put(a.individual, c.attr, c.value)
    return out


def conjuncts(c: Concept) -> Iterator[Concept]:
    if isinstance(c, And):
        for x in c.args:
            yield from conjuncts(x)
    else:
        yield c


class FactBase:
    """Read view of the active ABox used for matching."""

    def __init__(self, kb: KnowledgeBase, reasoner=None, skip_unsupported: bool = False):
        self.kb = kb
        self.skip_unsupported = skip_unsupported
        self.individuals = kb.individuals()
        self.values = told_values(kb)
        self.edges: dict[str, dict[str, list[str]]] = {}
        for a in kb.abox:
            if isinstance(a, Related):
                succ = self.edges.setdefault(a.role, {}).setdefault(a.subject, [])
                if a.object not in succ:
                    succ.append(a.object)
        self._reasoner = reasoner
        self._instances: dict[Concept, list[str]] = {}

    @property
    def reasoner(self):
        if self._reasoner is None:
            from ..reasoner.tableau import Reasoner

            self._reasoner = Reasoner(self.kb, skip_unsupported=self.skip_unsupported)
        return self._reasoner

    def instances(self, c: Concept) -> list[str]:
        if isinstance(c, Top):
            return self.individuals
        hit = self._instances.get(c)
        if hit is None:
            hit = self.reasoner.instances(c)
            self._instances[c] = hit
        return hit

    def related(self, role: str, subject: Optional[str]) -> Iterator[tuple[str, str]]:
        table = self.edges.get(role, {})
        if subject is not None:
            for o in table.get(subject, ()):
                yield subject, o
            return
        for s in sorted(table):
            for o in table[s]:
                yield s, o

    def attribute(self, attr: str, subject: Optional[str]) -> Iterator[tuple[str, Fraction]]:
        if subject is not None:
            for v in self.values.get((subject, attr), ()):
                yield subject, v
            return
        for (s, a), vals in sorted(self.values.items()):
            if a == attr:
                for v in vals:
                    yield s, v


def evaluate(e, binding: dict[Var, Value]) -> Optional[Fraction]:
    """Arithmetic over bound numeric values; None when something is unbound
    or not a number."""
    if isinstance(e, Var):
        v = binding.get(e)
        return v if isinstance(v, Fraction) else None
    if isinstance(e, (int, float)) and not isinstance(e, bool):
        return exact(e)
    if isinstance(e, Arith):
        args = [evaluate(a, binding) for a in e.args]
        if any(a is None for a in args):
            return None
        if e.op == "+":
            return sum(args, Fraction(0))
        if e.op == "*":
            out = Fraction(1)
            for a in args:
                out *= a
            return out
        if e.op == "-":
            return args[0] - args[1]
        if args[1] == 0:
            return None
        return args[0] / args[1]
    return None


def _bind(binding: dict, term, value) -> Optional[dict]:
    if isinstance(term, Var):
        old = binding.get(term)
        if old is None:
            out = dict(binding)
            out[term] = value
            return out
        if isinstance(old, Fraction) and isinstance(value, Fraction):
            return binding if close_enough(old, value) else None
        return binding if old == value else None
    if isinstance(value, Fraction):
        if isinstance(term, (int, float)) and not isinstance(term, bool):
            return binding if close_enough(exact(term), value) else None
        return None
    return binding if term == value else None


def _ground(term, binding: dict):
    if isinstance(term, Var):
        return binding.get(term)
    return term


def _order(body: tuple) -> list:
    """Generators first in their written order; each comparison right
    after the atom that binds its last variable."""
    gens = [a for a in body if not isinstance(a, Compare)]
    tests = [a for a in body if isinstance(a, Compare)]
    out: list = []
    bound: set[Var] = set()
    for g in gens:
        out.append(g)
        bound |= g.vars()
        ready = [t for t in tests if t.vars() <= bound]
        out.extend(ready)
        tests = [t for t in tests if t not in ready]
    return out + tests


def match(body: tuple, facts: FactBase, binding: Optional[dict] = None) -> Iterator[dict[Var, Value]]:
    """All bindings satisfying the conjunctive body."""
    atoms = _order(body)

    def go(i: int, b: dict):
        if i == len(atoms):
            yield b
            return
        atom = atoms[i]
        if isinstance(atom, Compare):
            left, right = evaluate(atom.left, b), evaluate(atom.right, b)
            if left is not None and right is not None and compare(left, atom.op, right):
                yield from go(i + 1, b)
            return
        if isinstance(atom, ConceptAtom):
            subject = _ground(atom.term, b)
            if isinstance(subject, Fraction):
                return
            pool = facts.instances(atom.concept)
            if subject is not None:
                if subject in pool:
                    yield from go(i + 1, b)
                return
            for ind in pool:
                yield from go(i + 1, _bind(b, atom.term, ind))
            return
        subject = _ground(atom.subject, b)
        if isinstance(subject, Fraction):
            return
        if facts.kb.is_attribute(atom.predicate):
            pairs = facts.attribute(atom.predicate, subject)
        else:
            pairs = facts.related(atom.predicate, subject)
        for s, o in pairs:
            nb = _bind(b, atom.subject, s)
            if nb is None:
                continue
            nb = _bind(nb, atom.object, o)
            if nb is not None:
                yield from go(i + 1, nb)

    yield from go(0, dict(binding or {}))


def _as_value(x: Fraction, integer: bool, attribute: str):
    if integer:
        if x.denominator != 1:
            raise ValueTypeError(f"{attribute} is declared integer but a rule derived {float(x)!r}")
        return int(x)
    return float(x)


def instantiate(head, binding: dict, kb: KnowledgeBase) -> Optional[Fact]:
    if isinstance(head, ConceptAtom):
        ind = _ground(head.term, binding)
        if not isinstance(ind, str) or isinstance(head.concept, Top):
            return None
        return InstanceOf(ind, head.concept)
    subject = _ground(head.subject, binding)
    if not isinstance(subject, str):
        return None
    if kb.is_attribute(head.predicate):
        x = evaluate(head.object, binding)
        if x is None:
            return None
        integer = kb.attribute_type(head.predicate) == INTEGER
        return AttrFiller(subject, _as_value(x, integer, head.predicate), head.predicate)
    obj = _ground(head.object, binding)
    if not isinstance(obj, str):
        return None
    return Related(subject, obj, head.predicate)


@dataclass
class Conflict:
    individual: str
    attribute: str
    told: tuple
    derived: object
    rule: RuleDef

    def __str__(self) -> str:
        told = ", ".join(format_number(float(v)) for v in self.told)
        return (
            f"{self.individual}.{self.attribute}: derived {format_number(self.derived)} "
            f"but already has {told} (rule {self.rule})"
        )


@dataclass
class Materialization:
    added: list[Fact] = field(default_factory=list)
    conflicts: list[Conflict] = field(default_factory=list)
    rounds: int = 0
    origin: dict[Fact, str] = field(default_factory=dict)

    def extend(self, other: "Materialization") -> None:
        self.added.extend(other.added)
        seen = {str(c) for c in self.conflicts}
        self.conflicts.extend(c for c in other.conflicts if str(c) not in seen)
        self.rounds += other.rounds
        self.origin.update(other.origin)


def rule_round(
    kb: KnowledgeBase, rules: Iterable[RuleDef], reasoner=None, skip_unsupported: bool = False
) -> Materialization:
    """One pass of every rule over the current facts.

    A derived attribute value that disagrees with a told one is reported as
    a conflict and not added; otherwise a rule such as ``v' = v + 1`` would
    never reach a fixpoint.
    """
    facts = FactBase(kb, reasoner, skip_unsupported)
    out = Materialization(rounds=1)
    fresh: dict[Fact, None] = {}
    derived: dict[tuple[str, str], Fraction] = {}
    for rule in rules:
        for b in match(rule.body, facts):
            fact = instantiate(rule.head, b, kb)
            if fact is None or fact in kb.abox or fact in fresh:
                continue
            if isinstance(fact, AttrFiller):
                key = (fact.individual, fact.attribute)
                x = exact(fact.value)
                told = list(facts.values.get(key, ()))
                if key in derived:
                    told.append(derived[key])
                if any(close_enough(x, y) for y in told):
                    continue
                if told:
                    out.conflicts.append(Conflict(fact.individual, fact.attribute, tuple(told), fact.value, rule))
                    continue
                derived[key] = x
            fresh[fact] = None
            out.origin[fact] = f"rule {rule}"
    out.added = list(fresh)
    return out


def apply_rules(
    kb: KnowledgeBase, rules: Optional[Iterable[RuleDef]] = None, skip_unsupported: bool = False
) -> Materialization:
    """Run the rules to a fixpoint, adding derived facts to ``kb``'s active
    ABox. Returns what was added."""
    rules = list(kb.rules if rules is None else rules)
    total = Materialization()
    if not rules:
        return total
    while True:
        step = rule_round(kb, rules, skip_unsupported=skip_unsupported)
        total.rounds += 1
        for c in step.conflicts:
            if not any(str(c) == str(d) for d in total.conflicts):
                total.conflicts.append(c)
        if not step.added:
            return total
        kb.add_all(step.added)
        total.added.extend(step.added)
        total.origin.update(step.origin)


def transitive_closure_facts(kb: KnowledgeBase) -> list[Related]:
    """Role assertions missing from the closure of each transitive role."""
    out: list[Related] = []
    for role in sorted(kb.transitive_roles()):
        names: dict[str, int] = {}
        pairs: set[tuple[int, int]] = set()
        for a in kb.abox:
            if isinstance(a, Related) and a.role == role:
                i = names.setdefault(a.subject, len(names))
                j = names.setdefault(a.object, len(names))
                pairs.add((i, j))
        back = {i: n for n, i in names.items()}
        for i, j in sorted(close_transitive(pairs) - pairs, key=lambda p: (back[p[0]], back[p[1]])):
            out.append(Related(back[i], back[j], role))
    return out


def materialize_transitive(kb: KnowledgeBase) -> Materialization:
    new = transitive_closure_facts(kb)
    kb.add_all(new)
    return Materialization(added=new, rounds=1, origin={f: f"transitivity of {f.role}" for f in new})


def materialize(kb: KnowledgeBase, skip_unsupported: bool = False) -> tuple[KnowledgeBase, Materialization]:
    """Copy of ``kb`` with transitive closures and rule consequences added,
    alternating both until nothing changes."""
    out = kb.copy()
    total = Materialization()
    while True:
        before = len(total.added)
        total.extend(materialize_transitive(out))
        total.extend(apply_rules(out, skip_unsupported=skip_unsupported))
        if len(total.added) == before:
            break
    if total.conflicts:
        for c in total.conflicts:
            log.warning("conflicting derived value: %s", c)
    return out, total


__all__ = [
    "Conflict",
    "FactBase",
    "Materialization",
    "apply_rules",
    "compare",
    "evaluate",
    "exact",
    "match",
    "materialize",
    "materialize_transitive",
    "told_values",
    "transitive_closure_facts",
]
