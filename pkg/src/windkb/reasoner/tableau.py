"""Tableau decision procedure for ALCQ with transitive roles and attributes.

The completion graph is explored one node at a time.  A generated node is
identified by its seed label (the concepts pushed into it by its parent);
because there are no inverse roles, whether a seed is satisfiable does not
depend on where the node sits, so results are cached per seed and a seed that
reappears below itself is blocked by its ancestor.  Satisfiable results that
rely on a still-open ancestor stay provisional until that ancestor resolves.

Boolean choices (disjunctions, the choose rule, merges of generated nodes
into named individuals) are explored depth first with dependency-directed
backjumping.
"""
from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ..errors import UnknownIndividual, UnsupportedAxiom
from ..model import concepts as C
from ..model.concepts import (
    BOTTOM,
    TOP,
    All,
    And,
    AtLeast,
    AtMost,
    AttrCmp,
    Bottom,
    Concept,
    HasAttr,
    Name,
    Not,
    Or,
    Some,
    Top,
    negate,
    nnf,
)
from ..model.kb import INTEGER, AttrFiller, InstanceOf, KnowledgeBase, Related
from ..model.tbox import Internalized, check_supported, internalize, tbox_cyclic
from .semantics import Interpretation, close_transitive

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

Deps = frozenset
NO_DEPS: frozenset = frozenset()
_NODE = "_"

BOOLEAN_CLASH = "BooleanClash"
CARDINALITY_CLASH = "CardinalityClash"
ATTRIBUTE_CLASH = "AttributeClash"
DISJOINTNESS_CLASH = "DisjointnessClash"


@dataclass(frozen=True)
class ClashReport:
    kind: str
    node: str
    exprs: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.kind} at {self.node}: " + ", ".join(self.exprs)


class _Fail:
    __slots__ = ("deps", "report")

    def __init__(self, deps: frozenset, report: Optional[ClashReport]):
        self.deps = deps
        self.report = report


class _Branch:
    __slots__ = ("alternatives", "deps")

    def __init__(self, alternatives: list[list[tuple[str, Concept]]], deps: frozenset):
        self.alternatives = alternatives
        self.deps = deps


@dataclass
class _Done:
    labels: dict[str, frozenset]
    # node -> [(role, [seed, ...])] generated successors per role
    successors: dict[str, list[tuple[str, list[frozenset]]]]


class _State:
    __slots__ = ("labels", "edges", "values")

    def __init__(self, labels, edges, values):
        self.labels: dict[str, dict[Concept, frozenset]] = labels
        self.edges: dict[tuple[str, str], list[str]] = edges
        self.values: dict[str, dict[str, C.Number]] = values

    def copy(self) -> "_State":
        return _State({n: dict(l) for n, l in self.labels.items()}, self.edges, self.values)


@dataclass
class ConsistencyResult:
    consistent: bool
    clash: Optional[ClashReport] = None
    witness: Optional[Interpretation] = None

    def __bool__(self) -> bool:
        return self.consistent


@dataclass
class CoherenceReport:
    coherent: bool
    unsatisfiable: list[str]
    all_unsatisfiable: list[str] = field(default_factory=list)
    inherited: dict[str, list[str]] = field(default_factory=dict)


@dataclass
class Hierarchy:
    """Named-concept taxonomy; classes of equivalent names are nodes."""

    classes: list[tuple[str, ...]]
    parents: dict[tuple[str, ...], list[tuple[str, ...]]]
    children: dict[tuple[str, ...], list[tuple[str, ...]]]
    class_of: dict[str, tuple[str, ...]]
    unsatisfiable: tuple[str, ...]
    top: tuple[str, ...] = ("top",)
    bottom: tuple[str, ...] = ("bottom",)

    def _cls(self, name: str) -> tuple[str, ...]:
        if name in ("top", "*top*"):
            return self.top
        if name in ("bottom", "*bottom*"):
            return self.bottom
        try:
            return self.class_of[name]
        except KeyError:
            raise KeyError(f"unknown concept {name}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.class_of or name in ("top", "*top*", "bottom", "*bottom*")

    def _names(self, classes: Iterable[tuple[str, ...]]) -> list[str]:
        out: set[str] = set()
        for cls in classes:
            out.update(n for n in cls if n not in ("top", "bottom"))
        return sorted(out)

    def direct_children(self, name: str, include_unsatisfiable: bool = False) -> list[str]:
        kids = self.children.get(self._cls(name), ())
        if not include_unsatisfiable:
            kids = [k for k in kids if k != self.bottom]
        return self._names(kids)

    def direct_parents(self, name: str) -> list[str]:
        return self._names(self.parents.get(self._cls(name), ()))

    def descendants(self, name: str, include_unsatisfiable: bool = False) -> list[str]:
        below = self._closure(self._cls(name), self.children)
        if not include_unsatisfiable:
            below.discard(self.bottom)
        return self._names(below)

    def ancestors(self, name: str) -> list[str]:
        return self._names(self._closure(self._cls(name), self.parents))

    def equivalents(self, name: str) -> list[str]:
        return sorted(n for n in self._cls(name) if n != name)

    @staticmethod
    def _closure(start, edges) -> set:
        seen: set = set()
        stack = list(edges.get(start, ()))
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(edges.get(x, ()))
        return seen

    def subsumers(self, name: str) -> list[str]:
        """All named strict-or-equivalent subsumers of ``name``."""
        return sorted(set(self.ancestors(name)) | set(self.equivalents(name)))


def _complement(c: Concept) -> Optional[Concept]:
    """The syntactic complement tested for closing a disjunct."""
    if isinstance(c, Name):
        return Not(c)
    if isinstance(c, Not):
        return c.arg
    if isinstance(c, HasAttr):
        return Not(c)
    if isinstance(c, AttrCmp):
        return Not(HasAttr(c.attr))
    return negate(c)


def _bounds(label, attr: str, fixed, integer: bool):
    """Tightest interval allowed for ``attr`` by the comparisons in ``label``."""
    lo, lo_s, hi, hi_s = -math.inf, False, math.inf, False
    if fixed is not None:
        lo = hi = fixed
    used = []
    for x in label:
        if not (isinstance(x, AttrCmp) and x.attr == attr):
            continue
        used.append(x)
        k, op = x.value, x.op
        if op in (">", ">=", "="):
            strict = op == ">"
            if k > lo or (k == lo and strict):
                lo, lo_s = k, strict
        if op in ("<", "<=", "="):
            strict = op == "<"
            if k < hi or (k == hi and strict):
                hi, hi_s = k, strict
    if integer:
        if lo > -math.inf:
            lo = math.floor(lo) + 1 if lo_s and lo == math.floor(lo) else math.ceil(lo)
            lo_s = False
        if hi < math.inf:
            hi = math.ceil(hi) - 1 if hi_s and hi == math.ceil(hi) else math.floor(hi)
            hi_s = False
    return lo, lo_s, hi, hi_s, used


def _pick(lo, lo_s, hi, hi_s, integer: bool):
    """A deterministic value inside the interval, preferring 0 and bounds."""

    def inside(v) -> bool:
        return (v > lo or (v == lo and not lo_s)) and (v < hi or (v == hi and not hi_s))

    for v in (0, lo, hi):
        if math.isfinite(v) and inside(v):
            return int(v) if integer or float(v).is_integer() and isinstance(v, int) else v
    if math.isfinite(lo) and math.isfinite(hi):
        return (lo + hi) / 2
    if math.isfinite(lo):
        return math.floor(lo) + 1
    return math.ceil(hi) - 1


def _or_args(c: Concept) -> list[Concept]:
    out: list[Concept] = []
    for a in c.args:
        if isinstance(a, Or):
            out.extend(_or_args(a))
        else:
            out.append(a)
    return out


class Reasoner:
    """Reasoning services over one (frozen) knowledge base.

    ``faults`` switches off individual rules; it exists so the differential
    tests can confirm they are able to notice a broken engine.
    """

    def __init__(
        self,
        kb: KnowledgeBase,
        skip_unsupported: bool = False,
        faults: Iterable[str] = (),
    ):
        self.kb = kb
        self.revision = kb.revision
        self.skip_unsupported = skip_unsupported
        self.faults = frozenset(faults)
        self.tbox: Internalized = internalize(kb, skip_unsupported)
        self.transitive = self.tbox.transitive
        self._global = tuple(sorted(set(self.tbox.global_conjuncts), key=str))
        self._integer = {a for a, d in kb.attributes.items() if d.value_type == INTEGER}
        self._cache: dict[frozenset, bool] = {}
        self._provisional: dict[frozenset, frozenset[int]] = {}
        self._on_stack: dict[frozenset, int] = {}
        self._path: list[frozenset] = []
        self._acc: list[set[int]] = []
        self._witness: dict[frozenset, _Done] = {}
        self._unsat_report: dict[frozenset, ClashReport] = {}
        self._branch_counter = itertools.count(1)
        self._rule_calls = 0
        self._abox_model: Optional[ConsistencyResult] = None
        self._hierarchy: Optional[Hierarchy] = None
        self.rejected_assertions: list[tuple[object, UnsupportedAxiom]] = []

    # ------------------------------------------------------------ checks

    def _supported(self, c: Concept) -> None:
        check_supported(c, self.transitive)

    @property
    def rejected_axioms(self):
        return list(self.tbox.rejected)

    # ------------------------------------------------------------ labels

    def _add(self, st: _State, node: str, c: Concept, deps: frozenset, queue: list) -> None:
        lab = st.labels[node]
        if c in lab or isinstance(c, Top):
            return
        lab[c] = deps
        queue.append((node, c))

    def _deps(self, lab: dict, concepts: Iterable[Concept]) -> frozenset:
        out = NO_DEPS
        for c in concepts:
            d = lab.get(c)
            if d:
                out = out | d
        return out

    def _name_clash(self, node: str, lab: dict, name: str, deps: frozenset) -> _Fail:
        pos, neg = Name(name), Not(Name(name))
        d = deps | lab.get(pos, NO_DEPS) | lab.get(neg, NO_DEPS)
        for other in sorted(x.name for x in lab if isinstance(x, Name)):
            if other != name and frozenset((name, other)) in self.tbox.disjoint_pairs:
                return _Fail(
                    d | lab[Name(other)],
                    ClashReport(DISJOINTNESS_CLASH, node, tuple(sorted((name, other)))),
                )
        return _Fail(d, ClashReport(BOOLEAN_CLASH, node, (str(pos), str(neg))))

    def _local_clash(self, st: _State, node: str, c: Concept, deps: frozenset) -> Optional[_Fail]:
        lab = st.labels[node]
        if isinstance(c, Bottom):
            return _Fail(deps, ClashReport(BOOLEAN_CLASH, node, ("bottom",)))
        if isinstance(c, Name):
            if Not(c) in lab:
                return self._name_clash(node, lab, c.name, deps)
        elif isinstance(c, Not):
            arg = c.arg
            if arg in lab:
                if isinstance(arg, Name):
                    return self._name_clash(node, lab, arg.name, deps)
                return _Fail(deps | lab[arg], ClashReport(BOOLEAN_CLASH, node, (str(arg), str(c))))
            if isinstance(arg, HasAttr):
                if arg.attr in st.values.get(node, ()):
                    return _Fail(deps, ClashReport(ATTRIBUTE_CLASH, node, (str(c), f"filler of {arg.attr}")))
                for x in lab:
                    if isinstance(x, AttrCmp) and x.attr == arg.attr:
                        return _Fail(deps | lab[x], ClashReport(ATTRIBUTE_CLASH, node, (str(x), str(c))))
        elif isinstance(c, (AttrCmp, HasAttr)):
            neg = Not(HasAttr(c.attr))
            if neg in lab:
                return _Fail(deps | lab[neg], ClashReport(ATTRIBUTE_CLASH, node, (str(c), str(neg))))
        elif isinstance(c, (AtLeast, Some, AtMost)):
            return self._card_clash(node, lab, c, deps)
        return None

    def _card_clash(self, node: str, lab: dict, c: Concept, deps: frozenset) -> Optional[_Fail]:
        if isinstance(c, AtMost):
            for x in lab:
                if isinstance(x, (AtLeast, Some)) and x.role == c.role:
                    m = x.n if isinstance(x, AtLeast) else 1
                    if m > c.n and (x.filler == c.filler or isinstance(c.filler, Top)):
                        return _Fail(deps | lab[x], ClashReport(CARDINALITY_CLASH, node, (str(x), str(c))))
            return None
        m = c.n if isinstance(c, AtLeast) else 1
        for x in lab:
            if isinstance(x, AtMost) and x.role == c.role and m > x.n:
                if x.filler == c.filler or isinstance(x.filler, Top):
                    return _Fail(deps | lab[x], ClashReport(CARDINALITY_CLASH, node, (str(c), str(x))))
        return None

    def _interval(self, st: _State, node: str, attr: str):
        """(lo, lo_strict, hi, hi_strict, deps, members) for one attribute."""
        lab = st.labels[node]
        fixed = st.values.get(node, {}).get(attr)
        lo, lo_s, hi, hi_s, used = _bounds(lab, attr, fixed, attr in self._integer)
        members = [str(x) for x in used]
        if fixed is not None:
            members.append(f"filler {C.format_number(fixed)}")
        return lo, lo_s, hi, hi_s, self._deps(lab, used), members

    def _interval_clash(self, st: _State, node: str, attr: str) -> Optional[_Fail]:
        lo, lo_s, hi, hi_s, deps, members = self._interval(st, node, attr)
        if lo > hi or (lo == hi and (lo_s or hi_s)):
            return _Fail(deps, ClashReport(ATTRIBUTE_CLASH, node, tuple(sorted(members))))
        return None

    def _close(self, st: _State, queue: list) -> Optional[_Fail]:
        tb = self.tbox
        touched: set[tuple[str, str]] = set()
        while queue:
            node, c = queue.pop()
            lab = st.labels[node]
            d = lab[c]
            fail = self._local_clash(st, node, c, d)
            if fail is not None:
                return fail
            if isinstance(c, And):
                for a in c.args:
                    self._add(st, node, a, d, queue)
            elif isinstance(c, Name):
                for x in tb.told.get(c.name, ()):
                    self._add(st, node, x, d, queue)
            elif isinstance(c, Not):
                if isinstance(c.arg, Name):
                    for x in tb.negative.get(c.arg.name, ()):
                        self._add(st, node, x, d, queue)
            elif isinstance(c, (Some, AtLeast)):
                self._role_used(st, node, c.role, d, queue)
            elif isinstance(c, (AttrCmp, HasAttr)):
                self._attribute_used(st, node, c.attr, d, queue)
                if isinstance(c, AttrCmp):
                    touched.add((node, c.attr))
            elif isinstance(c, All):
                for b in st.edges.get((node, c.role), ()):
                    self._add(st, b, c.filler, d, queue)
                    if c.role in self.transitive and "skip_forall_plus" not in self.faults:
                        self._add(st, b, c, d, queue)
            if not queue and touched:
                for node_attr in sorted(touched):
                    fail = self._interval_clash(st, *node_attr)
                    if fail is not None:
                        return fail
                touched.clear()
        return None

    def _role_used(self, st: _State, node: str, role: str, d: frozenset, queue: list) -> None:
        dom = self.tbox.role_domain.get(role)
        if dom is not None:
            self._add(st, node, dom, d, queue)
        rng = self.tbox.role_range.get(role)
        if rng is not None:
            self._add(st, node, All(role, rng), d, queue)
        for g in self.tbox.role_triggers.get(role, ()):
            self._add(st, node, g, NO_DEPS, queue)

    def _attribute_used(self, st: _State, node: str, attr: str, d: frozenset, queue: list) -> None:
        dom = self.tbox.attribute_domain.get(attr)
        if dom is not None:
            self._add(st, node, dom, d, queue)
        for g in self.tbox.attribute_triggers.get(attr, ()):
            self._add(st, node, g, NO_DEPS, queue)

    def _saturate(self, st: _State, queue: list):
        """Deterministic closure plus unit propagation over disjunctions.

        Returns a failure, ``None`` when every disjunction is satisfied, or
        the first open disjunction as ``(node, or, deps)``.
        """
        while True:
            fail = self._close(st, queue)
            if fail is not None:
                return fail
            pending = None
            for node in sorted(st.labels):
                lab = st.labels[node]
                ors = [x for x in lab if isinstance(x, Or)]
                if not ors:
                    continue
                for orc in sorted(ors, key=str):
                    args = _or_args(orc)
                    if any(a in lab or isinstance(a, Top) for a in args):
                        continue
                    live = []
                    dead = lab[orc]
                    for a in args:
                        if isinstance(a, Bottom):
                            continue
                        comp = _complement(a)
                        if comp in lab:
                            dead = dead | lab[comp]
                        else:
                            live.append(a)
                    if not live:
                        return _Fail(dead, ClashReport(BOOLEAN_CLASH, node, (str(orc),)))
                    if len(live) == 1:
                        self._add(st, node, live[0], dead, queue)
                    elif pending is None:
                        pending = (node, orc, lab[orc], sorted(live, key=str))
            if not queue:
                return pending

    def _search(self, st: _State, queue: list, leaf):
        res = self._saturate(st, queue)
        if isinstance(res, _Fail):
            return res
        if res is None:
            out = leaf(st)
            if not isinstance(out, _Branch):
                return out
            alternatives, base = out.alternatives, out.deps
        else:
            node, _orc, base, live = res
            alternatives = []
            for k, a in enumerate(live):
                alt = [(node, a)] + [(node, negate(b)) for b in live[:k]]
                alternatives.append(alt)
        bid = next(self._branch_counter)
        acc = NO_DEPS
        first: Optional[_Fail] = None
        for alt in alternatives:
            child = st.copy()
            q: list = []
            dep = base | acc | {bid}
            for node, c in alt:
                self._add(child, node, c, dep, q)
            out = self._search(child, q, leaf)
            if isinstance(out, _Done):
                return out
            if first is None:
                first = out
            if bid not in out.deps:
                return out
            acc = acc | (out.deps - {bid})
        return _Fail(base | acc, first.report if first else None)

    # ------------------------------------------------------------ successors

    def _seed(self, parts: Iterable[Concept]) -> frozenset:
        return frozenset(p for p in itertools.chain(parts, self._global) if not isinstance(p, Top))

    def _role_table(self, lab: dict) -> dict[str, dict[str, list]]:
        table: dict[str, dict[str, list]] = {}
        for c in lab:
            if isinstance(c, (Some, All, AtLeast, AtMost)):
                slot = table.setdefault(c.role, {"some": [], "all": [], "atleast": [], "atmost": []})
                key = {Some: "some", All: "all", AtLeast: "atleast", AtMost: "atmost"}[type(c)]
                slot[key].append(c)
        for slot in table.values():
            for v in slot.values():
                v.sort(key=str)
        return table

    def _expand_role(self, node: str, lab: dict, role: str, slot: dict, named: list[tuple[str, dict]]):
        """Satisfy the existential demands of ``node`` on ``role``.

        ``named`` lists the asserted successors as (individual, label).
        Returns ``(classes, None)`` with the generated successor seeds on
        success, ``(None, Branch)`` when only configurations that add
        concepts to named successors remain, or ``(None, Fail)``.
        """
        if not slot["some"] and not slot["atleast"]:
            return [], None
        r_deps = self._deps(lab, itertools.chain(*slot.values()))
        extra = [a.filler for a in slot["all"]]
        if role in self.transitive and "skip_forall_plus" not in self.faults:
            extra += slot["all"]
        fresh: list[tuple[frozenset, frozenset]] = []  # (seed, distinctness groups)
        for gid, c in enumerate(slot["atleast"]):
            have = sum(1 for _, nl in named if c.filler in nl or isinstance(c.filler, Top))
            if have >= c.n:
                continue
            seed = self._seed([c.filler, *extra])
            fresh.extend((seed, frozenset({gid})) for _ in range(c.n))
        for c in slot["some"]:
            if any(c.filler in seed for seed, _ in fresh):
                continue
            if any(c.filler in nl for _, nl in named):
                continue
            fresh.append((self._seed([c.filler, *extra]), NO_DEPS))
        if not fresh:
            return [], None
        named_deps = NO_DEPS
        for _, nl in named:
            named_deps |= self._deps(nl, nl)
        for seed in sorted({s for s, _ in fresh}, key=_seed_key):
            if not self._sat(seed):
                rep = self._unsat_report.get(seed)
                return None, _Fail(
                    r_deps,
                    ClashReport(rep.kind, f"{node}.{role}-successor", rep.exprs) if rep else None,
                )
        total = len(fresh) + len(named)
        limits = [(m.n, m.filler) for m in slot["atmost"] if total > m.n]
        if not limits:
            return [s for s, _ in fresh], None
        impure: list[list[tuple[str, Concept]]] = []
        seen: set = set()
        for classes, additions in self._configs(fresh, named, limits):
            key = (tuple(sorted(map(_seed_key, classes))), tuple(sorted((n, str(c)) for n, c in additions)))
            if key in seen:
                continue
            seen.add(key)
            if additions:
                impure.append(additions)
                continue
            if all(self._sat(s) for s in classes):
                return classes, None
        deps = r_deps | named_deps
        if impure:
            return None, _Branch(impure, deps)
        return None, _Fail(
            deps,
            ClashReport(CARDINALITY_CLASH, node, tuple(str(m) for m in slot["atmost"])),
        )

    def _configs(self, fresh, named, limits):
        """Choose-rule decisions followed by merges, in a fixed order."""
        choices = []
        for i, (seed, _) in enumerate(fresh):
            for n, g in limits:
                if isinstance(g, Top) or g in seed:
                    continue
                ng = negate(g)
                if ng in seed:
                    continue
                choices.append((i, g, ng))
        for picks in itertools.product(*[((i, ng), (i, g)) for i, g, ng in choices]):
            seeds = [set(s) for s, _ in fresh]
            for i, c in picks:
                seeds[i].add(c)
            nodes = [(frozenset(s), dist, None) for s, (_, dist) in zip(seeds, fresh)]
            nodes += [(frozenset(nl), None, name) for name, nl in named]
            yield from self._merges(nodes, limits, {name: nl for name, nl in named})

    def _merges(self, nodes, limits, orig_named):
        def count(g):
            return [i for i, (s, _, _) in enumerate(nodes) if isinstance(g, Top) or g in s]

        for n, g in limits:
            members = count(g)
            if len(members) <= n:
                continue
            # merge a generated node into another member of this constraint
            for y in members:
                sy, dy, ny = nodes[y]
                if ny is not None:
                    continue
                for x in members:
                    if x == y:
                        continue
                    sx, dx, nx = nodes[x]
                    if nx is None and (dx & dy or x > y):
                        continue
                    merged = list(nodes)
                    merged[x] = (sx | sy, None if nx is not None else dx | dy, nx)
                    del merged[y]
                    yield from self._merges(merged, limits, orig_named)
            return
        classes = [s for s, _, name in nodes if name is None]
        additions = []
        for s, _, name in nodes:
            if name is not None:
                orig = orig_named[name]
                additions.extend((name, c) for c in sorted(s, key=str) if c not in orig)
        yield classes, additions

    # ------------------------------------------------------------ per seed

    def _note(self, depths: frozenset) -> None:
        if self._acc:
            self._acc[-1] |= depths

    def _sat(self, seed: frozenset) -> bool:
        hit = self._cache.get(seed)
        if hit is not None:
            return hit
        assumed = self._provisional.get(seed)
        if assumed is None and seed in self._on_stack:
            assumed = frozenset((self._on_stack[seed],))
        if assumed is not None:
            self._note(assumed)
            return True
        depth = len(self._path)
        self._on_stack[seed] = depth
        self._path.append(seed)
        self._acc.append(set())
        try:
            st = _State({_NODE: {}}, {}, {})
            q: list = []
            for c in sorted(seed, key=str):
                self._add(st, _NODE, c, NO_DEPS, q)
            out = self._search(st, q, self._leaf_single)
        finally:
            acc = self._acc.pop()
            self._path.pop()
            del self._on_stack[seed]
        acc.discard(depth)
        rest = frozenset(acc)
        if isinstance(out, _Fail):
            self._cache[seed] = False
            if out.report is not None:
                self._unsat_report[seed] = out.report
            for s, dep in list(self._provisional.items()):
                if depth in dep:
                    del self._provisional[s]
                    self._witness.pop(s, None)
            return False
        self._witness[seed] = out
        for s, dep in list(self._provisional.items()):
            if depth in dep:
                dep = (dep - {depth}) | rest
                if dep:
                    self._provisional[s] = dep
                else:
                    del self._provisional[s]
                    self._cache[s] = True
        if rest:
            self._provisional[seed] = rest
            self._note(rest)
        else:
            self._cache[seed] = True
        return True

    def _leaf_single(self, st: _State):
        lab = st.labels[_NODE]
        succ = []
        for role, slot in sorted(self._role_table(lab).items()):
            classes, problem = self._expand_role(_NODE, lab, role, slot, [])
            if problem is not None:
                return problem
            if classes:
                succ.append((role, classes))
        return _Done({_NODE: frozenset(lab)}, {_NODE: succ})

    # ------------------------------------------------------------ ABox

    def _leaf_abox(self, st: _State):
        for a in sorted(st.labels):
            lab = st.labels[a]
            for role, slot in sorted(self._role_table(lab).items()):
                named = st.edges.get((a, role), ())
                if not slot["atmost"] or not named:
                    continue
                r_deps = self._deps(lab, itertools.chain(*slot.values()))
                demand = sum(c.n for c in slot["atleast"]) + len(slot["some"])
                for m in slot["atmost"]:
                    g = m.filler
                    if isinstance(g, Top):
                        inside = list(named)
                    else:
                        if len(named) + demand > m.n:
                            ng = negate(g)
                            for b in named:
                                lb = st.labels[b]
                                if g not in lb and ng not in lb:
                                    return _Branch([[(b, ng)], [(b, g)]], r_deps)
                        inside = [b for b in named if g in st.labels[b]]
                    if len(inside) > m.n:
                        deps = lab[m]
                        for b in inside:
                            deps = deps | st.labels[b].get(g, NO_DEPS)
                        report = ClashReport(CARDINALITY_CLASH, a, (str(m), *inside))
                        return _Fail(deps, report)
        succ: dict[str, list] = {}
        for a in sorted(st.labels):
            lab = st.labels[a]
            out = []
            for role, slot in sorted(self._role_table(lab).items()):
                named = [(b, st.labels[b]) for b in st.edges.get((a, role), ())]
                classes, problem = self._expand_role(a, lab, role, slot, named)
                if problem is not None:
                    return problem
                if classes:
                    out.append((role, classes))
            succ[a] = out
        return _Done({n: frozenset(l) for n, l in st.labels.items()}, succ)

    def _abox_state(self, assertions: Sequence):
        labels: dict[str, dict] = {}
        edges: dict[tuple[str, str], list[str]] = {}
        values: dict[str, dict[str, C.Number]] = {}
        pending: list[tuple[str, Concept]] = []
        for a in assertions:
            if isinstance(a, InstanceOf):
                labels.setdefault(a.individual, {})
                try:
                    self._supported(a.concept)
                except UnsupportedAxiom as exc:
                    if not self.skip_unsupported:
                        raise
                    self.rejected_assertions.append((a, exc))
                    continue
                pending.append((a.individual, nnf(a.concept)))
            elif isinstance(a, Related):
                labels.setdefault(a.subject, {})
                labels.setdefault(a.object, {})
                targets = edges.setdefault((a.subject, a.role), [])
                if a.object not in targets:
                    targets.append(a.object)
                dom = self.tbox.role_domain.get(a.role)
                if dom is not None:
                    pending.append((a.subject, dom))
                rng = self.tbox.role_range.get(a.role)
                if rng is not None:
                    pending.append((a.object, rng))
                pending.extend((a.subject, g) for g in self.tbox.role_triggers.get(a.role, ()))
            elif isinstance(a, AttrFiller):
                labels.setdefault(a.individual, {})
                slot = values.setdefault(a.individual, {})
                old = slot.get(a.attribute)
                if old is not None and old != a.value:
                    report = ClashReport(
                        ATTRIBUTE_CLASH,
                        a.individual,
                        (f"{a.attribute} = {C.format_number(old)}", f"{a.attribute} = {C.format_number(a.value)}"),
                    )
                    return None, _Fail(NO_DEPS, report)
                slot[a.attribute] = a.value
                dom = self.tbox.attribute_domain.get(a.attribute)
                if dom is not None:
                    pending.append((a.individual, dom))
                pending.extend((a.individual, g) for g in self.tbox.attribute_triggers.get(a.attribute, ()))
        for targets in edges.values():
            targets.sort()
        st = _State(labels, edges, values)
        queue: list = []
        for ind in sorted(labels):
            for g in self._global:
                self._add(st, ind, g, NO_DEPS, queue)
        for ind, c in pending:
            self._add(st, ind, c, NO_DEPS, queue)
        return st, queue

    @staticmethod
    def components(assertions: Sequence) -> list[list]:
        """Split assertions into groups that share no individual via roles."""
        parent: dict[str, str] = {}

        def find(x: str) -> str:
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in assertions:
            if isinstance(a, Related):
                ra, rb = find(a.subject), find(a.object)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
            else:
                find(a.individual)
        groups: dict[str, list] = {}
        for a in assertions:
            key = find(a.subject if isinstance(a, Related) else a.individual)
            groups.setdefault(key, []).append(a)
        return [groups[k] for k in sorted(groups)]

    def _consistent_component(self, assertions: Sequence):
        st, queue = self._abox_state(assertions)
        if st is None:
            return queue
        return self._search(st, queue, self._leaf_abox)

    def abox_consistent(self, extra: Sequence = (), witness: bool = True) -> ConsistencyResult:
        """Consistency of the active ABox (plus ``extra`` assertions)."""
        base = not extra
        if base and self._abox_model is not None:
            return self._abox_model
        assertions = list(self.kb.abox) + list(extra)
        done: list[_Done] = []
        for group in self.components(assertions):
            out = self._consistent_component(group)
            if isinstance(out, _Fail):
                result = ConsistencyResult(False, out.report)
                if base:
                    self._abox_model = result
                return result
            done.append(out)
        model = self._abox_interpretation(done, assertions) if witness else None
        result = ConsistencyResult(True, None, model)
        if base and witness:
            self._abox_model = result
        return result

    def instance_of(self, individual: str, c: Concept) -> bool:
        """Certain-answer check by refutation on the individual's component."""
        self._supported(c)
        if individual not in self.kb.individuals():
            raise UnknownIndividual(f"unknown individual {individual}")
        probe = InstanceOf(individual, Not(c))
        group = None
        for g in self.components(list(self.kb.abox) + [probe]):
            if probe in g:
                group = g
                break
        out = self._consistent_component(group)
        return isinstance(out, _Fail)

    def instances(self, c: Concept) -> list[str]:
        base = self.abox_consistent()
        individuals = self.kb.individuals()
        if not base.consistent:
            return individuals  # everything follows from an inconsistent ABox
        self._supported(c)
        model = base.witness
        ext = model.extension(nnf(c)) if model is not None else None
        out = []
        for ind in individuals:
            # a model in which ind is not in c refutes the instance relation
            if ext is not None and model.individuals[ind] not in ext:
                continue
            if self.instance_of(ind, c):
                out.append(ind)
        return out

    def types_of(self, individual: str, names: Optional[Iterable[str]] = None) -> list[str]:
        """Named concepts the individual certainly belongs to."""
        if individual not in self.kb.individuals():
            raise UnknownIndividual(f"unknown individual {individual}")
        names = self.concept_names() if names is None else list(names)
        base = self.abox_consistent()
        if not base.consistent:
            return sorted(names)
        model = base.witness
        x = model.individuals[individual]
        return [a for a in names if model.holds(Name(a), x) and self.instance_of(individual, Name(a))]

    # ------------------------------------------------------------ models

    def _abox_interpretation(self, done: list[_Done], assertions) -> Interpretation:
        builder = _ModelBuilder(self)
        labels: dict[str, frozenset] = {}
        succ: dict[str, list] = {}
        for d in done:
            labels.update(d.labels)
            succ.update(d.successors)
        values: dict[str, dict[str, C.Number]] = {}
        for a in assertions:
            if isinstance(a, AttrFiller):
                values.setdefault(a.individual, {})[a.attribute] = a.value
        ids = {}
        for ind in sorted(labels):
            ids[ind] = builder.new(labels[ind], values.get(ind))
        for a in assertions:
            if isinstance(a, Related):
                builder.edges.add((a.role, ids[a.subject], ids[a.object]))
        for ind in sorted(labels):
            builder.attach(ids[ind], succ.get(ind, ()))
        return builder.finish(ids)

    def _seed_interpretation(self, seed: frozenset) -> Interpretation:
        builder = _ModelBuilder(self)
        builder.seed_element(seed, 0)
        return builder.finish({})

    # ------------------------------------------------------------ concepts

    def _concept_seed(self, *concepts: Concept) -> frozenset:
        for c in concepts:
            self._supported(c)
        return self._seed(nnf(c) for c in concepts)

    def is_satisfiable(self, c: Concept) -> bool:
        return self._sat(self._concept_seed(c))

    def satisfiable_with_witness(self, c: Concept) -> tuple[bool, Optional[Interpretation]]:
        """Satisfiability plus a finite model in which element 0 is in ``c``."""
        seed = self._concept_seed(c)
        if not self._sat(seed):
            return False, None
        return True, self._seed_interpretation(seed)

    def subsumes(self, d: Concept, c: Concept) -> bool:
        self._supported(d)
        return not self._sat(self._concept_seed(c, Not(d)))

    def equivalent(self, c: Concept, d: Concept) -> bool:
        return self.subsumes(c, d) and self.subsumes(d, c)

    def disjoint(self, c: Concept, d: Concept) -> bool:
        return not self._sat(self._concept_seed(c, d))

    def unsat_reason(self, c: Concept) -> Optional[ClashReport]:
        seed = self._concept_seed(c)
        if self._sat(seed):
            return None
        return self._unsat_report.get(seed)

    # ------------------------------------------------------------ TBox services

    def concept_names(self) -> list[str]:
        return self.kb.concept_names()

    def tbox_cyclic(self) -> bool:
        return tbox_cyclic(self.kb)

    def told_subsumers(self) -> dict[str, set[str]]:
        """Names reachable through told conjuncts (reflexive, transitive)."""
        direct: dict[str, set[str]] = {}
        for a, cs in self.tbox.told.items():
            out: set[str] = set()
            stack = list(cs)
            while stack:
                x = stack.pop()
                if isinstance(x, Name):
                    out.add(x.name)
                elif isinstance(x, And):
                    stack.extend(x.args)
            direct[a] = out
        closed: dict[str, set[str]] = {}
        for a in self.concept_names():
            seen = {a}
            stack = [a]
            while stack:
                x = stack.pop()
                for y in direct.get(x, ()):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            closed[a] = seen
        return closed

    def tbox_coherent(self) -> CoherenceReport:
        names = self.concept_names()
        unsat = [a for a in names if not self.is_satisfiable(Name(a))]
        told = self.told_subsumers()
        bad = set(unsat)
        roots, inherited = [], {}
        for a in unsat:
            via = sorted(x for x in told.get(a, ()) if x != a and x in bad)
            if via:
                inherited[a] = via
            else:
                roots.append(a)
        return CoherenceReport(not unsat, roots, unsat, inherited)

    def classify(self, jobs: int = 1) -> Hierarchy:
        if self._hierarchy is None:
            from .classify import build_hierarchy

            self._hierarchy = build_hierarchy(self, jobs=jobs)
        return self._hierarchy


def _seed_key(seed: frozenset) -> tuple[str, ...]:
    return tuple(sorted(map(str, seed)))


class _ModelBuilder:
    """Unravels recorded tableau decisions into a finite interpretation.

    Generated elements are keyed by (seed, copy index): a node that needs two
    distinct successors with the same seed gets two copies, everything else
    is shared, which also realizes blocking cycles.
    """

    def __init__(self, reasoner: Reasoner):
        self.r = reasoner
        self.labels: list[frozenset] = []
        self.values: list[dict[str, C.Number]] = []
        self.edges: set[tuple[str, int, int]] = set()
        self.keys: dict[tuple[frozenset, int], int] = {}
        self.queue: list[tuple[int, list]] = []

    def new(self, label: frozenset, fixed: Optional[dict] = None) -> int:
        self.labels.append(label)
        self.values.append(dict(fixed or {}))
        return len(self.labels) - 1

    def seed_element(self, seed: frozenset, index: int) -> int:
        key = (seed, index)
        hit = self.keys.get(key)
        if hit is not None:
            return hit
        done = self.r._witness[seed]
        x = self.new(done.labels[_NODE])
        self.keys[key] = x
        self.queue.append((x, done.successors[_NODE]))
        while self.queue:
            y, succ = self.queue.pop()
            self.attach(y, succ)
        return x

    def attach(self, x: int, succ) -> None:
        for role, classes in succ:
            counts: dict[frozenset, int] = {}
            for s in classes:
                i = counts.get(s, 0)
                counts[s] = i + 1
                key = (s, i)
                y = self.keys.get(key)
                if y is None:
                    done = self.r._witness[s]
                    y = self.new(done.labels[_NODE])
                    self.keys[key] = y
                    self.queue.append((y, done.successors[_NODE]))
                self.edges.add((role, x, y))
        while self.queue:
            y, more = self.queue.pop()
            self.attach(y, more)

    def finish(self, individuals: dict[str, int]) -> Interpretation:
        r = self.r
        interp = Interpretation(len(self.labels), individuals=dict(individuals))
        for x, label in enumerate(self.labels):
            attrs = set()
            for c in label:
                if isinstance(c, Name):
                    interp.concepts.setdefault(c.name, set()).add(x)
                elif isinstance(c, (AttrCmp, HasAttr)):
                    attrs.add(c.attr)
            for a, v in self.values[x].items():
                interp.attributes.setdefault(a, {})[x] = v
            for a in sorted(attrs - set(self.values[x])):
                lo, lo_s, hi, hi_s, _ = _bounds(label, a, None, a in r._integer)
                interp.attributes.setdefault(a, {})[x] = _pick(lo, lo_s, hi, hi_s, a in r._integer)
        for role, x, y in self.edges:
            interp.roles.setdefault(role, set()).add((x, y))
        for role in r.transitive:
            if role in interp.roles:
                interp.roles[role] = close_transitive(interp.roles[role])
        for a in r.tbox.definition_order():
            interp.invalidate()
            interp.concepts[a] = set(interp.extension(r.tbox.definitions[a]))
        interp.invalidate()
        return interp
