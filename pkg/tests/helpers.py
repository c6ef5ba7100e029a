"""Shared hypothesis strategies and small builders."""
from __future__ import annotations

from hypothesis import strategies as st

from windkb.model import concepts as C
from windkb.model.kb import AttributeDecl, KnowledgeBase, RoleDecl

NAMES = ("A", "B", "C")
ROLES = ("r", "s")
ATTRS = ("a",)
CONSTANTS = (0, 1, 2.5)


def concepts(max_leaves: int = 8, names=NAMES, roles=ROLES, attrs=ATTRS, cardinality: bool = True, card_roles=None):
    leaves = [st.sampled_from([C.Name(n) for n in names]), st.just(C.TOP), st.just(C.BOTTOM)]
    if attrs:
        leaves.append(
            st.builds(C.AttrCmp, st.sampled_from(attrs), st.sampled_from(C.COMPARISON_OPS), st.sampled_from(CONSTANTS))
        )
        leaves.append(st.builds(C.HasAttr, st.sampled_from(attrs)))
    base = st.one_of(*leaves)

    def extend(inner):
        parts = [
            st.builds(C.Not, inner),
            st.builds(lambda xs: C.And(tuple(xs)), st.lists(inner, min_size=1, max_size=3)),
            st.builds(lambda xs: C.Or(tuple(xs)), st.lists(inner, min_size=1, max_size=3)),
        ]
        if roles:
            parts += [
                st.builds(C.Some, st.sampled_from(roles), inner),
                st.builds(C.All, st.sampled_from(roles), inner),
            ]
            if cardinality:
                parts += [
                    st.builds(C.AtLeast, st.integers(0, 2), st.sampled_from(card_roles or roles), inner),
                    st.builds(C.AtMost, st.integers(0, 2), st.sampled_from(card_roles or roles), inner),
                ]
        return st.one_of(*parts)

    return st.recursive(base, extend, max_leaves=max_leaves)


def small_kb(transitive=("s",), attribute_type="real") -> KnowledgeBase:
    kb = KnowledgeBase()
    for r in ROLES:
        kb.add(RoleDecl(r, transitive=r in transitive))
    for a in ATTRS:
        kb.add(AttributeDecl(a, None, attribute_type))
    return kb
