"""Command-line entry point: ``leanevol <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .engine import evolve_ast
from .llm.client import EndpointError
from .llm.prompts import get_strategy
from .pipeline.config import PipelineConfig, load_config, with_overrides
from .pipeline.curation import decontaminate
from .pipeline.records import DatasetRecord, dumps, load_records, read_jsonl, write_jsonl
from .pipeline.run import (
    derive_seed, evolve_difficulty, evolve_domain, llm_classifier, make_backends,
    run_pipeline, schedule,
)
from .pipeline.stats import deltas, histogram, histogram_table, label_records
from .syntax import ParseError, parse_statement, print_statement
from .verify.compiler import ToolchainError
from .verify.funnel import Verifier

log = logging.getLogger("leanevol")


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="pipeline config (.toml or .json)")
    p.add_argument("--seed", type=int, default=d, help="global RNG seed (u64)")
    p.add_argument("--mock", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="use the deterministic mock LLM and compiler")
    p.add_argument("--jobs", type=int, default=d, help="worker threads")
    p.add_argument("--out", default=d, help="output file or directory")
    p.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS if suppress else 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leanevol", description="Lean 4 statement evolution toolkit")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help):
        p = sub.add_parser(name, help=help)
        _global_options(p, suppress=True)
        return p

    p = cmd("parse", "round-trip check statements (parse, print, parse)")
    p.add_argument("input", help=".lean file, directory of .lean files, or jsonl")
    p.add_argument("--print", dest="show", action="store_true", help="print the canonical form")

    p = cmd("evolve-ast", "equivalence-preserving AST variants")
    p.add_argument("input")
    p.add_argument("--p", dest="prob", default=None, help="per-node probability, e.g. 0.5 or 1/2")
    p.add_argument("--variants", type=int, default=None)
    p.add_argument("--rules", default=None, help="comma-separated rule ids")

    p = cmd("evolve-domain", "cross-domain variants from the LLM")
    p.add_argument("input")
    p.add_argument("--calls", type=int, default=1)

    p = cmd("evolve-difficulty", "harder/easier variants from the LLM")
    p.add_argument("input")
    p.add_argument("--strategy", type=int, choices=range(1, 6), default=None)
    p.add_argument("--direction", type=int, choices=(1, -1), default=None)
    p.add_argument("--calls", type=int, default=2, help="calls per seed under round-robin scheduling")

    p = cmd("verify", "compile check, repair and judges for (nl, statement) pairs")
    p.add_argument("input", help="jsonl with formal_statement and nl_description")

    p = cmd("run", "full pipeline")
    p.add_argument("--input", dest="input_path", default=None)
    p.add_argument("--no-resume", action="store_true")

    p = cmd("stats", "domain histogram of a corpus")
    p.add_argument("corpus")
    p.add_argument("--before", default=None, help="earlier corpus for a delta table")
    p.add_argument("--classify", action="store_true", help="label unlabeled records with the LLM")
    p.add_argument("--review-csv", default=None)

    p = cmd("decontaminate", "drop statements alpha-equivalent to benchmark statements")
    p.add_argument("corpus")
    p.add_argument("--benchmark", action="append", required=True)
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    return with_overrides(cfg, rng_seed=getattr(args, "seed", None), mock=getattr(args, "mock", None) or None,
                          jobs=getattr(args, "jobs", None))


def _emit(rows, out) -> None:
    if out:
        write_jsonl(out, rows)
    else:
        for r in rows:
            sys.stdout.write(dumps(r) + "\n")


def _records(path) -> list[DatasetRecord]:
    p = Path(path)
    if p.is_file() and p.suffix == ".lean":
        return [DatasetRecord(p.name, p.read_text(encoding="utf-8").strip())]
    recs, report = load_records(p)
    for d in report.diagnostics:
        print(f"skipped: {d}", file=sys.stderr)
    return recs


def cmd_parse(args, cfg) -> int:
    failures = 0
    recs = _records(args.input)
    for r in recs:
        try:
            stmt = parse_statement(r.formal_statement)
            again = parse_statement(print_statement(stmt))
        except ParseError as exc:
            failures += 1
            print(f"FAIL {r.id}: {exc}")
            continue
        if again != stmt:
            failures += 1
            print(f"FAIL {r.id}: round trip changed the tree")
        elif args.show:
            print(print_statement(stmt))
        else:
            print(f"ok   {r.id}")
    print(f"{len(recs) - failures}/{len(recs)} statements round-trip", file=sys.stderr)
    return 1 if failures else 0


def cmd_evolve_ast(args, cfg) -> int:
    engine = cfg.engine
    if args.prob is not None:
        engine = replace(engine, p=Fraction(args.prob))
    if args.variants is not None:
        engine = replace(engine, variants_per_statement=args.variants)
    if args.rules:
        engine = replace(engine, enabled_rules=frozenset(x.strip() for x in args.rules.split(",")))
    rows = []
    for r in _records(args.input):
        try:
            stmt = parse_statement(r.formal_statement)
        except ParseError as exc:
            print(f"skipped {r.id}: {exc}", file=sys.stderr)
            continue
        seeded = replace(engine, rng_seed=derive_seed(cfg.rng_seed, r.id))
        for rec in evolve_ast(stmt, seeded, seed_id=r.id):
            rows.append({"id": f"{r.id}/ast{rec.metadata['variant_index']}", "formal_statement": rec.output,
                         "provenance": rec.to_dict()})
    _emit(rows, args.out)
    return 0


def _candidate_rows(cands) -> list[dict]:
    return [{"id": c.id, "method": c.method.value, "nl_description": c.variant.nl_description,
             "formal_statement": c.variant.formal_statement, "domain": c.variant.domain,
             "metadata": c.metadata} for c in cands]


def cmd_evolve_domain(args, cfg) -> int:
    backends = make_backends(cfg)
    rows = []
    for r in _records(args.input):
        rows += _candidate_rows(evolve_domain(r, cfg, backends.evolution, args.calls))
    _emit(rows, args.out)
    return 0


def cmd_evolve_difficulty(args, cfg) -> int:
    backends = make_backends(cfg)
    rows = []
    for i, r in enumerate(_records(args.input)):
        if args.strategy is not None or args.direction is not None:
            strats = [get_strategy(args.strategy or 1, args.direction or 1)]
        else:
            strats = schedule(i, args.calls)
        rows += _candidate_rows(evolve_difficulty(r, cfg, backends.evolution, strats))
    _emit(rows, args.out)
    return 0


def cmd_verify(args, cfg) -> int:
    backends = make_backends(cfg)
    verifier = Verifier(backends.compile, cfg.judge_llm, backends.judge,
                        judge_temperature=cfg.judge_llm.temperature)
    rows = []
    for r in _records(args.input):
        rep = verifier.verify(r.nl_description or "", r.formal_statement, r.id)
        d = rep.to_dict()
        d["final_statement"] = rep.final_statement
        rows.append(d)
    _emit(rows, args.out)
    return 0


def cmd_run(args, cfg) -> int:
    kw = {}
    if args.input_path:
        kw["input"] = args.input_path
    if args.out:
        kw["output"] = args.out
    if args.no_resume:
        kw["resume"] = False
    cfg = replace(cfg, **kw)
    result = run_pipeline(cfg)
    print(result.stats.table())
    print(f"\nwrote {result.corpus_path}")
    bad = result.stats.violations()
    for b in bad:
        print(f"conservation violated: {b}", file=sys.stderr)
    return 1 if bad else 0


def cmd_stats(args, cfg) -> int:
    rows = read_jsonl(args.corpus)
    classify = None
    if args.classify:
        classify = llm_classifier(cfg, make_backends(cfg).judge)
    after = histogram(label_records(rows, classify, args.review_csv))
    report = {"records": len(rows), "histogram": after}
    if args.before:
        before_rows = read_jsonl(args.before)
        before = histogram(label_records(before_rows, classify))
        report["before"] = before
        report["deltas"] = [{"domain": k, "before": b, "after": a, "delta": d} for k, b, a, d in deltas(before, after)]
        print(histogram_table(before, after))
    else:
        for k, v in after.items():
            print(f"{k}\t{v}")
    if args.out:
        Path(args.out).write_text(json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")
    return 0


def cmd_decontaminate(args, cfg) -> int:
    rows = read_jsonl(args.corpus)
    benches = []
    for b in args.benchmark:
        benches += _records(b)
    res = decontaminate(rows, benches)
    _emit(res.kept, args.out)
    if args.out:
        write_jsonl(str(args.out) + ".drops.jsonl",
                    [{"id": a, "benchmark_id": b, "kind": "drop"} for a, b in res.drops]
                    + [{"id": a, "benchmark_id": b, "kind": "advisory"} for a, b in res.advisory])
    print(f"dropped {len(res.drops)} of {len(rows)}; {len(res.advisory)} near-duplicate advisories", file=sys.stderr)
    for a, b in res.drops:
        print(f"drop {a} (matches {b})", file=sys.stderr)
    return 0


COMMANDS = {
    "parse": cmd_parse,
    "evolve-ast": cmd_evolve_ast,
    "evolve-domain": cmd_evolve_domain,
    "evolve-difficulty": cmd_evolve_difficulty,
    "verify": cmd_verify,
    "run": cmd_run,
    "stats": cmd_stats,
    "decontaminate": cmd_decontaminate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose or 0, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except ToolchainError as exc:
        print(f"error: Lean toolchain unavailable: {exc}", file=sys.stderr)
        return 2
    except EndpointError as exc:
        print(f"error: LLM endpoint failed: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
