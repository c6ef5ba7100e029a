"""Answering KRSS queries over a materialized knowledge base."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from ..errors import UnknownIndividual, WindKBError
from ..model.concepts import Concept, format_number
from ..model.kb import AttrFiller, InstanceOf, KnowledgeBase, Related
from ..reasoner.tableau import Hierarchy, Reasoner
from . import ast as Q
from .rules import FactBase, Materialization, conjuncts, match, materialize


class UnknownConcept(WindKBError):
    pass


def render_value(v) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return format_number(float(v))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return format_number(v)
    return str(v)


@dataclass
class Description:
    individual: str
    asserted: list[str]
    inferred: list[str]
    roles: list[tuple[str, str, bool]]  # (role, object, materialized)
    attributes: list[tuple[str, str, str]]  # (attribute, value, source)

    def lines(self) -> list[str]:
        out = [self.individual]
        out.append("  asserted types: " + (", ".join(self.asserted) or "-"))
        out.append("  most specific types: " + (", ".join(self.inferred) or "-"))
        out.append("  roles:")
        for role, obj, derived in self.roles:
            out.append(f"    {role} {obj}" + ("  (materialized)" if derived else ""))
        out.append("  attributes:")
        for attr, value, source in self.attributes:
            out.append(f"    {attr} = {value}" + ("" if source == "told" else f"  ({source})"))
        return out

    def as_dict(self) -> dict:
        return {
            "individual": self.individual,
            "asserted": self.asserted,
            "inferred": self.inferred,
            "roles": [{"role": r, "object": o, "materialized": m} for r, o, m in self.roles],
            "attributes": [{"attribute": a, "value": v, "source": s} for a, v, s in self.attributes],
        }


@dataclass
class Answer:
    query: str
    value: object

    def text(self) -> str:
        v = self.value
        lines = [f"> {self.query}"]
        if isinstance(v, bool):
            lines.append("T" if v else "NIL")
        elif isinstance(v, Description):
            lines.extend(v.lines())
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for row in v:
                lines.append(" ".join(f"{k}={row[k]}" for k in row))
        elif isinstance(v, list):
            lines.append("(" + " ".join(map(str, v)) + ")")
        else:
            lines.append(str(v))
        return "\n".join(lines)

    def json(self) -> str:
        v = self.value
        payload = v.as_dict() if isinstance(v, Description) else v
        return json.dumps({"query": self.query, "answer": payload}, sort_keys=True)

    def render(self, fmt: str = "text") -> str:
        return self.json() if fmt == "line-json" else self.text()


@dataclass
class QueryEngine:
    """Materializes the knowledge base once, then answers read-only queries."""

    source: KnowledgeBase
    jobs: int = 1
    skip_unsupported: bool = False
    kb: KnowledgeBase = field(init=False)
    derived: Materialization = field(init=False)

    def __post_init__(self):
        self.kb, self.derived = materialize(self.source, self.skip_unsupported)
        self.reasoner = Reasoner(self.kb, skip_unsupported=self.skip_unsupported)
        self._hierarchy: Optional[Hierarchy] = None
        self._facts: Optional[FactBase] = None

    @property
    def hierarchy(self) -> Hierarchy:
        if self._hierarchy is None:
            self._hierarchy = self.reasoner.classify(self.jobs)
        return self._hierarchy

    @property
    def facts(self) -> FactBase:
        if self._facts is None:
            self._facts = FactBase(self.kb, self.reasoner, self.skip_unsupported)
        return self._facts

    # ---------------------------------------------------------- services

    def consistent(self) -> bool:
        return not self.derived.conflicts and self.reasoner.abox_consistent().consistent

    def concept_instances(self, c: Concept) -> list[str]:
        if not self.consistent():
            return self.kb.individuals()
        return self.reasoner.instances(c)

    def _check_individual(self, name: str) -> None:
        if name not in self.kb.individuals():
            raise UnknownIndividual(f"unknown individual {name}")

    def most_specific_types(self, individual: str) -> list[str]:
        self._check_individual(individual)
        h = self.hierarchy
        names = [n for n in self.reasoner.concept_names() if n not in h.unsatisfiable]
        types = set(self.reasoner.types_of(individual, names))
        return sorted(t for t in types if not any(t in h.ancestors(u) for u in types))

    def describe_individual(self, individual: str) -> Description:
        self._check_individual(individual)
        derived = set(self.derived.added)
        asserted = sorted(
            {str(a.concept) for a in self.source.abox if isinstance(a, InstanceOf) and a.individual == individual}
        )
        roles = sorted(
            (a.role, a.object, a in derived)
            for a in self.kb.abox
            if isinstance(a, Related) and a.subject == individual
        )
        attrs: dict[tuple[str, str], str] = {}
        for a in self.kb.abox:
            if isinstance(a, AttrFiller) and a.individual == individual:
                attrs.setdefault((a.attribute, render_value(a.value)), "derived" if a in derived else "told")
            elif isinstance(a, InstanceOf) and a.individual == individual:
                for c in conjuncts(a.concept):
                    if getattr(c, "op", None) == "=":
                        attrs.setdefault((c.attr, render_value(c.value)), "told")
        return Description(
            individual,
            asserted,
            self.most_specific_types(individual),
            roles,
            sorted((a, v, s) for (a, v), s in attrs.items()),
        )

    def _named(self, name: str) -> str:
        if name not in self.hierarchy:
            raise UnknownConcept(f"unknown concept {name}")
        return name

    def retrieve(self, query: Q.Conjunctive) -> list[dict[str, str]]:
        rows = set()
        for b in match(query.body, self.facts):
            rows.add(tuple(render_value(b[v]) for v in query.head_vars))
        heads = [v.name for v in query.head_vars]
        return [dict(zip(heads, r)) for r in sorted(rows)]

    # ---------------------------------------------------------- dispatch

    def answer(self, query) -> Answer:
        r = self.reasoner
        if isinstance(query, Q.TBoxCyclic):
            value: object = r.tbox_cyclic()
        elif isinstance(query, Q.TBoxCoherent):
            value = r.tbox_coherent().coherent
        elif isinstance(query, Q.AboxConsistent):
            value = self.consistent()
        elif isinstance(query, Q.DescribeIndividual):
            value = self.describe_individual(query.name)
        elif isinstance(query, Q.ConceptChildren):
            value = self.hierarchy.direct_children(self._named(query.name))
        elif isinstance(query, Q.ConceptDescendants):
            value = self.hierarchy.descendants(self._named(query.name))
        elif isinstance(query, Q.ConceptParents):
            value = self.hierarchy.direct_parents(self._named(query.name))
        elif isinstance(query, Q.ConceptAncestors):
            value = self.hierarchy.ancestors(self._named(query.name))
        elif isinstance(query, Q.ConceptInstances):
            value = self.concept_instances(query.concept)
        elif isinstance(query, Q.ConceptSatisfiable):
            value = r.is_satisfiable(query.concept)
        elif isinstance(query, Q.ConceptSubsumes):
            value = r.subsumes(query.subsumer, query.subsumee)
        elif isinstance(query, Q.IndividualInstance):
            self._check_individual(query.individual)
            value = not self.consistent() or r.instance_of(query.individual, query.concept)
        elif isinstance(query, Q.Conjunctive):
            value = self.retrieve(query)
        else:
            raise WindKBError(f"not a query: {query}")
        return Answer(str(query), value)

    def answer_all(self, queries: Iterable) -> list[Answer]:
        return [self.answer(q) for q in queries]


def concept_instances(kb: KnowledgeBase, c: Concept) -> list[str]:
    return QueryEngine(kb).concept_instances(c)


def describe_individual(kb: KnowledgeBase, individual: str) -> Description:
    return QueryEngine(kb).describe_individual(individual)


__all__ = [
    "Answer",
    "Description",
    "QueryEngine",
    "UnknownConcept",
    "concept_instances",
    "describe_individual",
    "render_value",
]
