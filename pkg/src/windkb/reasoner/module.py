"""Syntactic locality modules.

An axiom is local for a signature when interpreting every symbol outside the
signature as empty makes it hold trivially.  A concept is satisfiable with
respect to the TBox iff it is satisfiable with respect to the module of its
signature, so the oracle can ground a handful of axioms instead of the whole
ontology.
"""
from __future__ import annotations

from typing import Iterable

from ..model import concepts as C
from ..model.kb import GCI, Disjoint, Equiv, KnowledgeBase


def _empty(c: C.Concept, sig: set[str]) -> bool:
    """Is ``c`` empty in every interpretation where symbols outside ``sig`` are?"""
    if isinstance(c, C.Bottom):
        return True
    if isinstance(c, C.Name):
        return c.name not in sig
    if isinstance(c, C.Not):
        return _full(c.arg, sig)
    if isinstance(c, C.And):
        return any(_empty(a, sig) for a in c.args)
    if isinstance(c, C.Or):
        return all(_empty(a, sig) for a in c.args)
    if isinstance(c, C.Some):
        return c.role not in sig or _empty(c.filler, sig)
    if isinstance(c, C.AtLeast):
        return c.n > 0 and (c.role not in sig or _empty(c.filler, sig))
    if isinstance(c, (C.AttrCmp, C.HasAttr)):
        return c.attr not in sig
    return False


def _full(c: C.Concept, sig: set[str]) -> bool:
    if isinstance(c, C.Top):
        return True
    if isinstance(c, C.Not):
        return _empty(c.arg, sig)
    if isinstance(c, C.And):
        return all(_full(a, sig) for a in c.args)
    if isinstance(c, C.Or):
        return any(_full(a, sig) for a in c.args)
    if isinstance(c, C.All):
        return c.role not in sig or _full(c.filler, sig)
    if isinstance(c, C.AtMost):
        return c.role not in sig or _empty(c.filler, sig)
    if isinstance(c, C.AtLeast):
        return c.n == 0
    return False


def _symbols(c: C.Concept) -> set[str]:
    return C.concept_names(c) | C.roles_used(c) | C.attributes_used(c)


def is_local(axiom, sig: set[str]) -> bool:
    if isinstance(axiom, GCI):
        return _empty(axiom.lhs, sig) or _full(axiom.rhs, sig)
    if isinstance(axiom, Equiv):
        return (_empty(axiom.lhs, sig) and _empty(axiom.rhs, sig)) or (
            _full(axiom.lhs, sig) and _full(axiom.rhs, sig)
        )
    if isinstance(axiom, Disjoint):
        return sum(not _empty(m, sig) for m in axiom.members) <= 1
    raise TypeError(f"not a TBox axiom: {axiom!r}")


def module_signature(kb: KnowledgeBase, seeds: Iterable[C.Concept]) -> set[str]:
    sig: set[str] = set()
    for c in seeds:
        sig |= _symbols(c)
    changed = True
    while changed:
        changed = False
        for ax in kb.axioms:
            if not is_local(ax, sig):
                new = set().union(*(_symbols(c) for c in ax.concepts())) - sig
                if new:
                    sig |= new
                    changed = True
        for name, d in kb.roles.items():
            if name in sig:
                for c in (d.domain, d.range):
                    if c is not None and not _full(c, sig) and _symbols(c) - sig:
                        sig |= _symbols(c)
                        changed = True
        for name, d in kb.attributes.items():
            if name in sig and d.domain is not None and _symbols(d.domain) - sig:
                sig |= _symbols(d.domain)
                changed = True
    return sig


def module_kb(kb: KnowledgeBase, seeds: Iterable[C.Concept]) -> KnowledgeBase:
    """TBox-only knowledge base holding the module for ``seeds``."""
    sig = module_signature(kb, seeds)
    out = KnowledgeBase()
    for name in sorted(sig):
        if name in kb.roles:
            out.add(kb.roles[name])
        elif name in kb.attributes:
            out.add(kb.attributes[name])
    out.add_all(ax for ax in kb.axioms if not is_local(ax, sig))
    return out


def _told_names(kb: KnowledgeBase) -> dict[str, set[str]]:
    """Named conjuncts on the right of ``A implies ...``, read off the axioms."""
    direct: dict[str, set[str]] = {}

    def conj(c):
        if isinstance(c, C.Name):
            yield c.name
        elif isinstance(c, C.And):
            for x in c.args:
                yield from conj(x)

    for ax in kb.axioms:
        if isinstance(ax, (GCI, Equiv)) and isinstance(ax.lhs, C.Name):
            direct.setdefault(ax.lhs.name, set()).update(conj(ax.rhs))
        if isinstance(ax, Equiv) and isinstance(ax.lhs, C.Name) and isinstance(ax.rhs, C.Name):
            direct.setdefault(ax.rhs.name, set()).add(ax.lhs.name)
    return direct


def oracle_unsatisfiable_names(kb: KnowledgeBase, max_domain: int = 8) -> tuple[list[str], list[str]]:
    """(every name without a finite model, those not explained by a told
    unsatisfiable subsumer), decided by the oracle on locality modules."""
    from .oracle import oracle_satisfiable

    unsat = [a for a in kb.concept_names()
             if not oracle_satisfiable(module_kb(kb, [C.Name(a)]), C.Name(a), max_domain).satisfiable]
    bad = set(unsat)
    direct = _told_names(kb)
    roots = []
    for a in unsat:
        seen, stack = {a}, [a]
        while stack:
            for y in direct.get(stack.pop(), ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if not (seen - {a}) & bad:
            roots.append(a)
    return unsat, roots
