"""Command-line interface.

Exit status: 0 on success (coherent, consistent, compliant), 1 on a semantic
negative (incoherent, inconsistent, violation, oracle disagreement), 2 on
usage, parse or data errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import corpus
from .errors import KRSSError, WindKBError
from .fuzz import PROFILES, GenSpec, fuzz_satisfiability
from .geo import check_compliance
from .ingest import INGESTERS, SchemaError, ingest
from .krss.forms import parse_document
from .loader import Loaded, load_files, load_text
from .model.kb import KnowledgeBase
from .query.competency import compare_with_expected, run_competency_suite
from .query.engine import QueryEngine

OK, NEGATIVE, ERROR = 0, 1, 2


class _Usage(Exception):
    pass


def _emit(args, text_lines: Sequence[str], payload) -> None:
    if args.format == "line-json":
        for obj in payload if isinstance(payload, list) else [payload]:
            print(json.dumps(obj, sort_keys=True))
    else:
        for ln in text_lines:
            print(ln)


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(args) -> Loaded:
    files = list(getattr(args, "files", None) or [])
    variant = getattr(args, "corpus", None)
    if not files and variant is None:
        raise _Usage("no input: give KRSS files or --corpus intended|literal")
    kb = KnowledgeBase(strict=args.strict)
    out = Loaded(kb)
    if variant is not None:
        for name in corpus.MANIFEST[variant]:
            load_text(corpus.read(name), f"{name}.krss", into=out)
    for f in files:
        p = Path(f)
        if not p.is_file():
            raise _Usage(f"no such file: {f}")
        load_text(p.read_text(encoding="utf-8"), str(p), into=out)
    for d in out.diagnostics:
        _err(str(d))
    return out


def _engine(args, loaded: Loaded) -> QueryEngine:
    engine = QueryEngine(loaded.kb, jobs=args.jobs, skip_unsupported=not args.strict)
    for ax, exc in engine.reasoner.rejected_axioms:
        _err(f"warning: rejected {ax}: {exc}")
    return engine


# ------------------------------------------------------------------ commands


def cmd_check(args) -> int:
    loaded = _load(args)
    if loaded.diagnostics:
        return ERROR
    engine = _engine(args, loaded)
    r = engine.reasoner
    cyclic = r.tbox_cyclic()
    coh = r.tbox_coherent()
    consistent = engine.consistent()
    rejected = [str(ax) for ax, _ in r.rejected_axioms]
    lines = [
        f"tbox-cyclic: {'T' if cyclic else 'NIL'}",
        f"tbox-coherent: {'T' if coh.coherent else 'NIL'}",
        f"abox-consistent: {'T' if consistent else 'NIL'}",
    ]
    if coh.unsatisfiable:
        lines.append("unsatisfiable: " + " ".join(coh.unsatisfiable))
    for name, causes in sorted(coh.inherited.items()):
        lines.append(f"  {name} (via {' '.join(causes)})")
    for c in engine.derived.conflicts:
        lines.append(f"rule conflict: {c}")
    for ax in rejected:
        lines.append(f"rejected: {ax}")
    _emit(
        args,
        lines,
        {
            "cyclic": cyclic,
            "coherent": coh.coherent,
            "consistent": consistent,
            "unsatisfiable": coh.unsatisfiable,
            "all_unsatisfiable": coh.all_unsatisfiable,
            "rejected": rejected,
        },
    )
    return OK if coh.coherent and consistent else NEGATIVE


def cmd_classify(args) -> int:
    loaded = _load(args)
    if loaded.diagnostics:
        return ERROR
    h = _engine(args, loaded).hierarchy
    rows = []
    for cls in sorted(h.classes):
        name = cls[0]
        rows.append({"concept": name, "equivalents": list(cls[1:]), "parents": h.direct_parents(name)})
    lines = [
        f"{r['concept']}" + (f" = {' '.join(r['equivalents'])}" if r["equivalents"] else "")
        + f" < {' '.join(r['parents']) or 'top'}"
        for r in rows
    ]
    if h.unsatisfiable:
        lines.append("unsatisfiable: " + " ".join(h.unsatisfiable))
    payload = rows + ([{"unsatisfiable": list(h.unsatisfiable)}] if h.unsatisfiable else [])
    _emit(args, lines, payload)
    return OK


def cmd_query(args) -> int:
    loaded = _load(args)
    queries = list(loaded.queries)
    if args.queries:
        text = Path(args.queries).read_text(encoding="utf-8")
        forms, diags = parse_document(text)
        for d in diags:
            _err(f"{args.queries}:{d}")
        if diags:
            return ERROR
        queries = [f.payload for f in forms if f.kind.name == "QUERY"]
    if loaded.diagnostics:
        return ERROR
    if not queries:
        return OK
    engine = _engine(args, loaded)
    status = OK
    for q in queries:
        try:
            ans = engine.answer(q)
        except WindKBError as e:
            _err(f"{q}: {e}")
            status = ERROR
            continue
        print(ans.render(args.format))
    return status


def cmd_rules(args) -> int:
    loaded = _load(args)
    if loaded.diagnostics:
        return ERROR
    engine = _engine(args, loaded)
    added = [str(a) for a in engine.derived.added]
    conflicts = [str(c) for c in engine.derived.conflicts]
    lines = added + [f"; conflict: {c}" for c in conflicts]
    _emit(args, lines, [{"derived": a} for a in added] + [{"conflict": c} for c in conflicts])
    return NEGATIVE if conflicts else OK


def cmd_ingest(args) -> int:
    try:
        with open(args.csv, encoding="utf-8", newline="") as fh:
            result = ingest(args.kind, fh)
    except (OSError, SchemaError) as e:
        _err(str(e))
        return ERROR
    for d in result.diagnostics:
        _err(f"{args.csv}: {d}")
    text = result.to_krss(args.abox or "")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    _err(f"{result.accepted} rows accepted, {result.rejected} rejected")
    return OK


def cmd_compliance(args) -> int:
    if not args.threshold > 0:
        raise _Usage("--threshold must be positive")
    loaded = _load(args)
    if loaded.diagnostics:
        return ERROR
    engine = _engine(args, loaded)
    try:
        report = check_compliance(engine.kb, args.turbine, args.threshold, reasoner=engine.reasoner)
    except WindKBError as e:
        _err(str(e))
        return ERROR
    _emit(args, report.lines(), report.as_dict())
    return OK if report.compliant else NEGATIVE


def cmd_cq_suite(args) -> int:
    if not args.files and args.corpus is None:
        args.corpus = "intended"
    loaded = _load(args)
    if loaded.diagnostics:
        return ERROR
    report = run_competency_suite(loaded.kb, threshold_m=args.threshold, jobs=args.jobs)
    status = OK
    lines = report.lines()
    payload = report.as_dict()
    if args.files == [] and args.corpus == "intended" and not args.no_expected:
        diff = compare_with_expected(report, corpus.expected_answer)
        for cq, problem in sorted(diff.items()):
            lines.append(f"{cq}: {'ok' if problem is None else 'MISMATCH ' + problem}")
            payload[cq]["matches_expected"] = problem is None
        if any(p is not None for p in diff.values()):
            status = NEGATIVE
    if args.format == "line-json":
        for cq in sorted(payload):
            print(json.dumps({"cq": cq, **payload[cq]}, sort_keys=True))
    else:
        print("\n".join(lines))
    return status


def cmd_fuzz_oracle(args) -> int:
    spec = GenSpec.profile(args.profile, seed=args.seed, max_domain=args.max_domain)
    faults = [args.inject_fault] if args.inject_fault else []
    report = fuzz_satisfiability(spec, args.cases, faults=faults, stop_after=args.stop_after)
    lines = [f"profile {args.profile}, seed {args.seed}: {report.summary()}"]
    for d in report.disagreements:
        lines.append(f"; disagreement: tableau={d.verdict.tableau} oracle={d.verdict.oracle} witness_ok={d.verdict.witness_ok}")
        lines.append(d.repro.rstrip("\n"))
    if args.repro_dir and report.disagreements:
        out = Path(args.repro_dir)
        out.mkdir(parents=True, exist_ok=True)
        for d in report.disagreements:
            (out / f"case-{d.case.index}.krss").write_text(d.repro, encoding="utf-8")
    _emit(
        args,
        lines,
        {
            "profile": args.profile,
            "seed": args.seed,
            "cases": report.cases,
            "agreements": report.agreements,
            "disagreements": [d.repro for d in report.disagreements],
        },
    )
    return OK if report.ok else NEGATIVE


# ------------------------------------------------------------------ parser


def _common(defaults: bool) -> argparse.ArgumentParser:
    # the subcommand copy suppresses its defaults so that flags given before
    # the subcommand are not reset by it
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "line-json"), default=d("text"))
    common.add_argument("--strict", action="store_true", default=d(False), help="undeclared symbols and unsupported axioms are errors")
    common.add_argument("--jobs", type=int, default=d(1), help="parallel subsumption tests during classification")
    common.add_argument("--threshold", type=float, default=d(300.0), help="minimum setback in meters")
    common.add_argument("--seed", type=int, default=d(42))
    common.add_argument("--max-domain", type=int, default=d(4), help="largest domain the oracle tries")
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(False)
    p = argparse.ArgumentParser(prog="windkb", description="Wind-energy knowledge base reasoner.", parents=[_common(True)])
    sub = p.add_subparsers(dest="command", required=True)

    def with_inputs(name: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.add_argument("files", nargs="*", help="KRSS files, loaded in order")
        sp.add_argument("--corpus", choices=corpus.VARIANTS, help="load the bundled corpus first")
        return sp

    with_inputs("check", "cyclicity, coherence and consistency").set_defaults(func=cmd_check)
    with_inputs("classify", "print the concept hierarchy").set_defaults(func=cmd_classify)
    q = with_inputs("query", "answer queries")
    q.add_argument("-q", "--queries", help="file of query forms (default: the queries in the inputs)")
    q.set_defaults(func=cmd_query)
    with_inputs("rules", "print the facts derived by rules and transitive closure").set_defaults(func=cmd_rules)
    c = with_inputs("compliance", "residential setback check for one turbine")
    c.add_argument("--turbine", default="wt1")
    c.set_defaults(func=cmd_compliance)
    s = with_inputs("cq-suite", "run the competency questions")
    s.add_argument("--no-expected", action="store_true", help="do not compare with the bundled expected answers")
    s.set_defaults(func=cmd_cq_suite)

    i = sub.add_parser("ingest", help="convert a CSV map layer to KRSS assertions", parents=[common])
    i.add_argument("kind", choices=sorted(INGESTERS))
    i.add_argument("csv")
    i.add_argument("-o", "--output")
    i.add_argument("--abox", help="start the output with (init-abox NAME)")
    i.set_defaults(func=cmd_ingest)

    f = sub.add_parser("fuzz-oracle", help="differential test of the tableau against the finite-model oracle", parents=[common])
    f.add_argument("--cases", type=int, default=500)
    f.add_argument("--profile", choices=sorted(PROFILES), default="default")
    f.add_argument("--stop-after", type=int)
    f.add_argument("--inject-fault", choices=("skip_forall_plus",), help="disable a tableau rule to check the harness")
    f.add_argument("--repro-dir", help="write minimized repro files here")
    f.set_defaults(func=cmd_fuzz_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ERROR if e.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except _Usage as e:
        _err(f"windkb: {e}")
        return ERROR
    except (KRSSError, WindKBError, ValueError) as e:
        _err(f"windkb: {e}")
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
