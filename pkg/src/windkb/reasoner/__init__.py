"""Reasoning services: the tableau, classification and the finite-model oracle."""
from .oracle import oracle_consistent, oracle_satisfiable
from .tableau import CoherenceReport, ConsistencyResult, Hierarchy, Reasoner


def abox_consistent(kb, **kw) -> bool:
    return Reasoner(kb, **kw).abox_consistent(witness=False).consistent


def tbox_coherent(kb, **kw) -> CoherenceReport:
    return Reasoner(kb, **kw).tbox_coherent()


def classify(kb, jobs: int = 1, **kw) -> Hierarchy:
    return Reasoner(kb, **kw).classify(jobs)


__all__ = [
    "CoherenceReport",
    "ConsistencyResult",
    "Hierarchy",
    "Reasoner",
    "abox_consistent",
    "classify",
    "oracle_consistent",
    "oracle_satisfiable",
    "tbox_coherent",
]
