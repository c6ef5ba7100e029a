"""Syntax trees for rules and queries."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..model.concepts import Concept, format_number


@dataclass(frozen=True, order=True)
class Var:
    name: str  # includes the leading '?'

    def __str__(self) -> str:
        return self.name


Term = Union[Var, str, int, float]


@dataclass(frozen=True)
class Arith:
    op: str  # one of + - * /
    args: tuple["Expr", ...]

    def __str__(self) -> str:
        return f"({self.op} " + " ".join(_term_text(a) for a in self.args) + ")"


Expr = Union[Var, int, float, Arith]


def _term_text(t) -> str:
    if isinstance(t, (int, float)) and not isinstance(t, bool):
        return format_number(t)
    return str(t)


def expr_vars(e) -> set[Var]:
    if isinstance(e, Var):
        return {e}
    if isinstance(e, Arith):
        out: set[Var] = set()
        for a in e.args:
            out |= expr_vars(a)
        return out
    return set()


@dataclass(frozen=True)
class ConceptAtom:
    term: Term
    concept: Concept

    def vars(self) -> set[Var]:
        return {self.term} if isinstance(self.term, Var) else set()

    def __str__(self) -> str:
        return f"({_term_text(self.term)} {self.concept})"


@dataclass(frozen=True)
class BinaryAtom:
    """``(subject object predicate)``: a role atom or an attribute atom.

    Which one is decided against the knowledge base's declarations when the
    atom is evaluated, because the syntax does not distinguish them.
    """

    subject: Term
    object: Union[Term, Arith]
    predicate: str

    def vars(self) -> set[Var]:
        out = {self.subject} if isinstance(self.subject, Var) else set()
        return out | expr_vars(self.object)

    def __str__(self) -> str:
        return f"({_term_text(self.subject)} {_term_text(self.object)} {self.predicate})"


@dataclass(frozen=True)
class Compare:
    left: Expr
    op: str
    right: Expr

    def vars(self) -> set[Var]:
        return expr_vars(self.left) | expr_vars(self.right)

    def __str__(self) -> str:
        return f"({self.op} {_term_text(self.left)} {_term_text(self.right)})"


Atom = Union[ConceptAtom, BinaryAtom, Compare]


def body_text(body: tuple) -> str:
    if len(body) == 1:
        return str(body[0])
    return "(and " + " ".join(map(str, body)) + ")"


@dataclass(frozen=True)
class RuleDef:
    head: Union[ConceptAtom, BinaryAtom]
    body: tuple[Atom, ...]

    def __str__(self) -> str:
        return f"(define-rule {self.head} {body_text(self.body)})"


# ------------------------------------------------------------------ queries


@dataclass(frozen=True)
class TBoxCyclic:
    keyword = "tbox-cyclic?"

    def __str__(self):
        return f"({self.keyword})"


@dataclass(frozen=True)
class TBoxCoherent:
    keyword = "tbox-coherent?"

    def __str__(self):
        return f"({self.keyword})"


@dataclass(frozen=True)
class AboxConsistent:
    keyword = "abox-consistent?"

    def __str__(self):
        return f"({self.keyword})"


@dataclass(frozen=True)
class DescribeIndividual:
    name: str
    keyword = "describe-individual"

    def __str__(self):
        return f"({self.keyword} {self.name})"


@dataclass(frozen=True)
class _NamedConceptQuery:
    name: str
    keyword = ""

    def __str__(self):
        return f"({self.keyword} {self.name})"


@dataclass(frozen=True)
class ConceptChildren(_NamedConceptQuery):
    keyword = "concept-children"


@dataclass(frozen=True)
class ConceptDescendants(_NamedConceptQuery):
    keyword = "concept-descendants"


@dataclass(frozen=True)
class ConceptParents(_NamedConceptQuery):
    keyword = "concept-parents"


@dataclass(frozen=True)
class ConceptAncestors(_NamedConceptQuery):
    keyword = "concept-ancestors"


@dataclass(frozen=True)
class ConceptInstances:
    concept: Concept
    keyword = "concept-instances"

    def __str__(self):
        return f"({self.keyword} {self.concept})"


@dataclass(frozen=True)
class ConceptSatisfiable:
    concept: Concept
    keyword = "concept-satisfiable?"

    def __str__(self):
        return f"({self.keyword} {self.concept})"


@dataclass(frozen=True)
class ConceptSubsumes:
    subsumer: Concept
    subsumee: Concept
    keyword = "concept-subsumes?"

    def __str__(self):
        return f"({self.keyword} {self.subsumer} {self.subsumee})"


@dataclass(frozen=True)
class IndividualInstance:
    individual: str
    concept: Concept
    keyword = "individual-instance?"

    def __str__(self):
        return f"({self.keyword} {self.individual} {self.concept})"


@dataclass(frozen=True)
class Conjunctive:
    head_vars: tuple[Var, ...]
    body: tuple[Atom, ...]
    keyword = "retrieve"

    def __str__(self):
        head = "(" + " ".join(map(str, self.head_vars)) + ")"
        return f"({self.keyword} {head} {body_text(self.body)})"


QueryAst = Union[
    TBoxCyclic,
    TBoxCoherent,
    AboxConsistent,
    DescribeIndividual,
    ConceptChildren,
    ConceptDescendants,
    ConceptParents,
    ConceptAncestors,
    ConceptInstances,
    ConceptSatisfiable,
    ConceptSubsumes,
    IndividualInstance,
    Conjunctive,
]


def check_safe(head_terms: set[Var], body: tuple) -> list[Var]:
    """Variables violating DL-safety: every variable must be bound by a
    concept or binary atom of the body. Returns the offending variables."""
    bound: set[Var] = set()
    for atom in body:
        if isinstance(atom, ConceptAtom):
            bound |= atom.vars()
        elif isinstance(atom, BinaryAtom):
            if isinstance(atom.subject, Var):
                bound.add(atom.subject)
            if isinstance(atom.object, Var):
                bound.add(atom.object)
    used = set(head_terms)
    for atom in body:
        used |= atom.vars()
    return sorted(used - bound)
