"""Classification of named concepts into a subsumption hierarchy."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING

from ..model.concepts import Name, Not

if TYPE_CHECKING:
    from .tableau import Hierarchy, Reasoner


def _run_tests(reasoner: "Reasoner", pairs: list[tuple[str, str]]) -> list[bool]:
    return [reasoner.subsumes(Name(b), Name(a)) for a, b in pairs]


def build_hierarchy(reasoner: "Reasoner", jobs: int = 1) -> "Hierarchy":
    """Pairwise subsumption with pruning.

    A candidate subsumer B of A is only tested when it holds at the root of
    the model the tableau built for A; told subsumers need no test at all.
    """
    from .tableau import Hierarchy, Reasoner

    names = reasoner.concept_names()
    witness = {}
    unsat = []
    for a in names:
        ok, model = reasoner.satisfiable_with_witness(Name(a))
        if ok:
            witness[a] = model
        else:
            unsat.append(a)
    sat = [a for a in names if a in witness]
    top_names = [a for a in sat if not reasoner.is_satisfiable(Not(Name(a)))]
    told = reasoner.told_subsumers()
    subs: dict[str, set[str]] = {a: {a} for a in sat}
    pending: list[tuple[str, str]] = []
    for a in sat:
        model = witness[a]
        for b in sat:
            if b == a:
                continue
            if b in told.get(a, ()) or b in top_names:
                subs[a].add(b)
            elif model.holds(Name(b), 0):
                pending.append((a, b))
    if jobs > 1 and len(pending) > 1:
        chunks = [pending[i::jobs] for i in range(jobs)]

        def work(chunk):
            local = Reasoner(reasoner.kb, reasoner.skip_unsupported, reasoner.faults)
            return _run_tests(local, chunk)

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, chunks))
        verdict = {}
        for chunk, res in zip(chunks, results):
            verdict.update(zip(chunk, res))
        answers = [verdict[p] for p in pending]
    else:
        answers = _run_tests(reasoner, pending)
    for (a, b), yes in zip(pending, answers):
        if yes:
            subs[a].add(b)

    top = tuple(["top"] + sorted(top_names))
    bottom = tuple(["bottom"] + sorted(unsat))
    class_of: dict[str, tuple[str, ...]] = {a: bottom for a in unsat}
    class_of.update({a: top for a in top_names})
    classes: list[tuple[str, ...]] = []
    for a in sat:
        if a in class_of:
            continue
        cls = tuple(sorted(b for b in subs[a] if a in subs.get(b, ())))
        for b in cls:
            class_of[b] = cls
        classes.append(cls)
    classes.sort()
    strict: dict[tuple, set[tuple]] = {}
    for cls in classes:
        rep = cls[0]
        strict[cls] = {class_of[b] for b in subs[rep]} - {cls, top}
    parents: dict[tuple, list[tuple]] = {}
    children: dict[tuple, list[tuple]] = {top: [], bottom: []}
    for cls in classes:
        ups = strict[cls]
        direct = [p for p in ups if not any(p in strict[q] for q in ups if q != p)]
        parents[cls] = sorted(direct) or [top]
        for p in parents[cls]:
            children.setdefault(p, []).append(cls)
    leaves = [cls for cls in classes if not children.get(cls)]
    parents[bottom] = sorted(leaves) or [top]
    for p in parents[bottom]:
        children.setdefault(p, []).append(bottom)
    parents[top] = []
    for k in children:
        children[k].sort()
    return Hierarchy(
        classes=[top] + classes + [bottom],
        parents=parents,
        children=children,
        class_of=class_of,
        unsatisfiable=tuple(sorted(unsat)),
        top=top,
        bottom=bottom,
    )
