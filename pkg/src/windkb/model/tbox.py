"""TBox preprocessing: absorption, lazy unfolding and internalization."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import UnsupportedAxiom
from .concepts import (
    BOTTOM,
    TOP,
    All,
    And,
    AtLeast,
    AtMost,
    Bottom,
    Concept,
    HasAttr,
    Name,
    Not,
    Or,
    Top,
    concept_names,
    negate,
    nnf,
    walk,
)
from .kb import GCI, Disjoint, Equiv, KnowledgeBase, TBoxAxiom


@dataclass
class Internalized:
    """The TBox compiled into the pieces the tableau consumes.

    ``told[A]`` lists NNF concepts every instance of ``A`` must satisfy;
    ``negative[A]`` does the same for ``(not A)`` and is only populated for
    unfoldable definitions.  Everything that could not be absorbed ends up as
    a conjunct of the global constraint, which is added to every node.
    """

    told: dict[str, tuple[Concept, ...]] = field(default_factory=dict)
    negative: dict[str, tuple[Concept, ...]] = field(default_factory=dict)
    definitions: dict[str, Concept] = field(default_factory=dict)
    global_conjuncts: tuple[Concept, ...] = ()
    disjoint_pairs: frozenset = frozenset()
    role_domain: dict[str, Concept] = field(default_factory=dict)
    role_range: dict[str, Concept] = field(default_factory=dict)
    attribute_domain: dict[str, Concept] = field(default_factory=dict)
    # global conjuncts that hold vacuously at elements without successors on
    # the role (or without a value for the attribute); added only where the
    # role or attribute is used, like a domain
    role_triggers: dict[str, tuple[Concept, ...]] = field(default_factory=dict)
    attribute_triggers: dict[str, tuple[Concept, ...]] = field(default_factory=dict)
    transitive: frozenset = frozenset()
    rejected: list[tuple[TBoxAxiom, UnsupportedAxiom]] = field(default_factory=list)

    @property
    def global_constraint(self) -> Concept:
        if not self.global_conjuncts:
            return TOP
        return And(self.global_conjuncts)

    def definition_order(self) -> list[str]:
        """Unfoldable names, each after the names its definition uses."""
        order: list[str] = []
        done: set[str] = set()

        def visit(a: str) -> None:
            if a in done:
                return
            done.add(a)
            for b in sorted(concept_names(self.definitions[a])):
                if b in self.definitions:
                    visit(b)
            order.append(a)

        for a in sorted(self.definitions):
            visit(a)
        return order


def dependency_graph(axioms: Iterable[TBoxAxiom]) -> dict[str, set[str]]:
    """name -> names used on the right of its definitional axioms."""
    graph: dict[str, set[str]] = {}
    for ax in axioms:
        if isinstance(ax, (GCI, Equiv)) and isinstance(ax.lhs, Name):
            graph.setdefault(ax.lhs.name, set()).update(concept_names(ax.rhs))
        elif isinstance(ax, Equiv) and isinstance(ax.rhs, Name):
            graph.setdefault(ax.rhs.name, set()).update(concept_names(ax.lhs))
    return graph


def has_cycle(graph: dict[str, set[str]]) -> bool:
    return bool(names_on_cycles(graph))


def names_on_cycles(graph: dict[str, set[str]]) -> set[str]:
    """Nodes that can reach themselves (iterative Tarjan SCC)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    result: set[str] = set()
    counter = 0
    for root in sorted(graph):
        if root in index:
            continue
        work = [(root, iter(sorted(graph.get(root, ()))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            nxt = next(it, None)
            if nxt is not None:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(graph.get(nxt, ())))))
                elif nxt in on_stack:
                    low[v] = min(low[v], index[nxt])
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in graph.get(v, ()):
                    result.update(comp)
    return result


def check_supported(c: Concept, transitive: frozenset) -> None:
    for x in walk(c):
        if isinstance(x, (AtLeast, AtMost)) and x.role in transitive:
            raise UnsupportedAxiom(
                f"number restriction {x} over transitive role {x.role}",
                hint=f"introduce a non-transitive sub-role (e.g. hasDirect{x.role[3:] if x.role.startswith('has') else x.role}) "
                f"for the cardinality and add (implies (some <sub-role> C) (some {x.role} C))",
            )


def _or_args(c: Concept) -> list[Concept]:
    if isinstance(c, Or):
        out: list[Concept] = []
        for a in c.args:
            out.extend(_or_args(a))
        return out
    return [c]


def _and_args(c: Concept) -> list[Concept]:
    if isinstance(c, And):
        out: list[Concept] = []
        for a in c.args:
            out.extend(_and_args(a))
        return out
    return [c]


def _disjunction(parts: list[Concept]) -> Concept:
    parts = [p for p in parts if not isinstance(p, Bottom)]
    if any(isinstance(p, Top) for p in parts):
        return TOP
    if not parts:
        return BOTTOM
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _trigger(c: Concept):
    """A disjunct that makes ``c`` true wherever a role or attribute is
    unused: ``(all r X)`` or ``(not (a attr))``."""
    for part in _or_args(c):
        if isinstance(part, All):
            return ("role", part.role)
    for part in _or_args(c):
        if isinstance(part, Not) and isinstance(part.arg, HasAttr):
            return ("attribute", part.arg.attr)
    return None


def internalize(kb: KnowledgeBase, skip_unsupported: bool = False) -> Internalized:
    """Compile the TBox of ``kb``.

    An (equivalent A C) is lazily unfolded when A takes part in no cycle of
    the definitional dependency graph and appears on the left of no other
    axiom; other inclusions with a named left side are absorbed into that
    name, and the rest are internalized into the global constraint.
    """
    transitive = kb.transitive_roles()
    out = Internalized(transitive=transitive)
    axioms: list[TBoxAxiom] = []
    for ax in kb.axioms:
        try:
            for c in ax.concepts():
                check_supported(c, transitive)
        except UnsupportedAxiom as exc:
            if not skip_unsupported:
                raise
            out.rejected.append((ax, exc))
            continue
        axioms.append(ax)

    # names with something on the left besides a single definition
    lhs_uses: dict[str, int] = {}
    definitions: dict[str, list[Concept]] = {}
    for ax in axioms:
        if isinstance(ax, Equiv):
            lhs, rhs = ax.lhs, ax.rhs
            if not isinstance(lhs, Name) and isinstance(rhs, Name):
                lhs, rhs = rhs, lhs
            if isinstance(lhs, Name):
                definitions.setdefault(lhs.name, []).append(rhs)
                continue
        elif isinstance(ax, GCI):
            for part in _or_args(ax.lhs):
                if isinstance(part, Name):
                    lhs_uses[part.name] = lhs_uses.get(part.name, 0) + 1
            continue
        for c in ax.concepts() if isinstance(ax, Disjoint) else ():
            for part in _or_args(c):
                if isinstance(part, Name):
                    lhs_uses[part.name] = lhs_uses.get(part.name, 0) + 1

    cyclic = names_on_cycles(dependency_graph(axioms))
    unfoldable = {
        a: rhs[0]
        for a, rhs in definitions.items()
        if len(rhs) == 1 and a not in lhs_uses and a not in cyclic
    }

    told: dict[str, list[Concept]] = {}
    glob: list[Concept] = []

    def absorb(lhs: Concept, rhs: Concept) -> None:
        for part in _or_args(lhs):
            if isinstance(part, Bottom):
                continue
            if isinstance(part, Top):
                glob.append(nnf(rhs))
                continue
            if isinstance(part, Name) and part.name not in unfoldable:
                told.setdefault(part.name, []).append(nnf(rhs))
                continue
            conj = _and_args(part)
            named = sorted(
                (x for x in conj if isinstance(x, Name) and x.name not in unfoldable),
                key=lambda x: x.name,
            )
            if named:
                a = named[0]
                rest = list(conj)
                rest.remove(a)
                told.setdefault(a.name, []).append(
                    _disjunction([negate(r) for r in rest] + [nnf(rhs)])
                )
                continue
            glob.append(_disjunction([negate(part), nnf(rhs)]))

    pairs: set[frozenset] = set()
    for ax in axioms:
        if isinstance(ax, GCI):
            absorb(ax.lhs, ax.rhs)
        elif isinstance(ax, Equiv):
            lhs, rhs = ax.lhs, ax.rhs
            if not isinstance(lhs, Name) and isinstance(rhs, Name):
                lhs, rhs = rhs, lhs
            if isinstance(lhs, Name) and lhs.name in unfoldable:
                continue
            absorb(lhs, rhs)
            absorb(rhs, lhs)
        else:
            members = list(ax.members)
            for i, ci in enumerate(members):
                for cj in members[i + 1:]:
                    if isinstance(ci, Name) and isinstance(cj, Name):
                        pairs.add(frozenset((ci.name, cj.name)))
                    absorb(ci, negate(cj))

    for a, rhs in unfoldable.items():
        told.setdefault(a, []).append(nnf(rhs))
        out.negative[a] = (negate(rhs),)
    out.definitions = dict(unfoldable)
    out.told = {a: tuple(dict.fromkeys(cs)) for a, cs in told.items()}
    rest: list[Concept] = []
    role_triggers: dict[str, list[Concept]] = {}
    attribute_triggers: dict[str, list[Concept]] = {}
    for c in dict.fromkeys(c for c in glob if not isinstance(c, Top)):
        key = _trigger(c)
        if key is None:
            rest.append(c)
        elif key[0] == "role":
            role_triggers.setdefault(key[1], []).append(c)
        else:
            attribute_triggers.setdefault(key[1], []).append(c)
    out.global_conjuncts = tuple(rest)
    out.role_triggers = {k: tuple(v) for k, v in role_triggers.items()}
    out.attribute_triggers = {k: tuple(v) for k, v in attribute_triggers.items()}
    out.disjoint_pairs = frozenset(pairs)
    for name, decl in kb.roles.items():
        if decl.domain is not None:
            out.role_domain[name] = nnf(decl.domain)
        if decl.range is not None:
            out.role_range[name] = nnf(decl.range)
    for name, decl in kb.attributes.items():
        if decl.domain is not None:
            out.attribute_domain[name] = nnf(decl.domain)
    return out


def tbox_cyclic(kb: KnowledgeBase) -> bool:
    return has_cycle(dependency_graph(kb.axioms))
