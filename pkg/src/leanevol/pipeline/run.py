"""Three-phase orchestration: LLM evolution, verification, AST evolution.

Work is done per seed; each finished seed is appended to a jsonl journal in
the output directory so an interrupted run picks up where it stopped.  The
final corpus is assembled in seed order, so output bytes do not depend on
worker scheduling.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import random
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

from ..engine import EvolutionRecord, Method, Status, evolve_ast
from ..llm.client import Backend, CallStats, EndpointError, HttpBackend, MockBackend, RateLimiter, call_llm
from ..llm.mock import MockLLM
from ..llm.prompts import (
    DifficultyStrategy, DomainList, get_strategy, render_classify_prompt,
    render_difficulty_prompt, render_domain_prompt, template_digest,
)
from ..llm.responses import Variant, fenced_blocks, filter_domain, parse_variants
from ..syntax import ParseError, parse_statement
from ..verify.compiler import CompileResult, MockCompiler, make_compiler
from ..verify.funnel import Final, Verifier
from .config import PipelineConfig
from .curation import decontaminate, dedup, statement_key
from .records import SCHEMA_VERSION, DatasetRecord, dumps, load_records, write_jsonl
from .stats import FunnelStats, histogram

log = logging.getLogger(__name__)

JOURNAL = "journal.jsonl"
DIRECTIONS = (1, -1)


def derive_seed(rng_seed: int, key: str) -> int:
    digest = hashlib.sha256(f"{rng_seed}:{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def schedule(ordinal: int, calls: int) -> list[DifficultyStrategy]:
    """Round-robin over (strategy 1..5) x (up, down), continuing across seeds."""
    combos = list(itertools.product(range(1, 6), DIRECTIONS))
    start = ordinal * calls
    return [get_strategy(*combos[(start + j) % len(combos)]) for j in range(calls)]


@dataclass
class Backends:
    evolution: Backend
    judge: Backend
    compile: Callable[[str], CompileResult]


def make_backends(cfg: PipelineConfig, evolution: Backend | None = None, judge: Backend | None = None,
                  compiler: Callable[[str], CompileResult] | None = None) -> Backends:
    if cfg.mock:
        mock = MockLLM(DomainList(cfg.domains))
        return Backends(evolution or MockBackend(mock), judge or MockBackend(mock), compiler or MockCompiler())
    return Backends(
        evolution or HttpBackend(cfg.evolution_llm),
        judge or HttpBackend(cfg.judge_llm),
        compiler or make_compiler(cfg.compiler),
    )


# ---------------------------------------------------------------------------
# phase 1: LLM evolution


@dataclass
class Candidate:
    id: str
    method: Method
    variant: Variant
    metadata: dict


def evolve_domain(seed: DatasetRecord, cfg: PipelineConfig, backend: Backend, calls: int = 1,
                  limiter: RateLimiter | None = None, stats: CallStats | None = None,
                  delta: Counter | None = None) -> list[Candidate]:
    delta = delta if delta is not None else Counter()
    domains = DomainList(cfg.domains)
    out = []
    for c in range(calls):
        prompt = render_domain_prompt(seed.formal_statement, domains)
        delta["llm_calls"] += 1
        try:
            text = call_llm(prompt, cfg.evolution_llm, backend, limiter=limiter, stats=stats)
        except EndpointError as exc:
            log.warning("%s: domain call failed: %s", seed.id, exc)
            delta["llm_call_failures"] += 1
            continue
        parsed = parse_variants(text, expect_domain=True, domains=domains)
        delta["response_diagnostics"] += len(parsed.diagnostics)
        for i, v in enumerate(parsed.variants):
            out.append(Candidate(f"{seed.id}/dom{c}.{i}", Method.DOMAIN, v, {
                "domain": v.domain, "call": c, "template": template_digest("domain"),
            }))
    return out


def evolve_difficulty(seed: DatasetRecord, cfg: PipelineConfig, backend: Backend, strategies: list[DifficultyStrategy],
                      limiter: RateLimiter | None = None, stats: CallStats | None = None,
                      delta: Counter | None = None) -> list[Candidate]:
    delta = delta if delta is not None else Counter()
    out = []
    for c, strat in enumerate(strategies):
        prompt = render_difficulty_prompt(seed.formal_statement, strat)
        delta["llm_calls"] += 1
        try:
            text = call_llm(prompt, cfg.evolution_llm, backend, limiter=limiter, stats=stats)
        except EndpointError as exc:
            log.warning("%s: difficulty call failed: %s", seed.id, exc)
            delta["llm_call_failures"] += 1
            continue
        parsed = parse_variants(text, expect_domain=False)
        delta["response_diagnostics"] += len(parsed.diagnostics)
        kind = "difficulty_up" if strat.direction > 0 else "difficulty_down"
        for i, v in enumerate(parsed.variants):
            out.append(Candidate(f"{seed.id}/diff{c}.{i}", Method.DIFFICULTY, v, {
                "strategy": strat.id, "direction": strat.direction, "title": strat.title,
                "call": c, "template": template_digest(kind),
            }))
    return out


# ---------------------------------------------------------------------------
# per-seed work


def _row(rid, stmt, nl, method, seed_id, domain, provenance, verification, rng_seed, parent=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": rid,
        "formal_statement": stmt,
        "nl_description": nl,
        "method": method,
        "seed_id": seed_id,
        "parent_id": parent,
        "domain": domain,
        "provenance": provenance,
        "verification": verification,
        "rng_seed": rng_seed,
    }


def ast_rows(parent: dict, cfg: PipelineConfig, delta: Counter) -> list[dict]:
    delta["ast_inputs"] += 1
    try:
        stmt = parse_statement(parent["formal_statement"])
    except ParseError as exc:
        log.info("%s: not parseable, passed through without AST evolution (%s)", parent["id"], exc)
        delta["ast_unparseable"] += 1
        return []
    engine = replace(cfg.engine, rng_seed=derive_seed(cfg.rng_seed, parent["id"]))
    out = []
    for rec in evolve_ast(stmt, engine, seed_id=parent["seed_id"]):
        rec.status = Status.VERIFIED
        rec.metadata["parent_id"] = parent["id"]
        rid = f"{parent['id']}/ast{rec.metadata['variant_index']}"
        out.append(_row(rid, rec.output, parent["nl_description"], Method.AST.value, parent["seed_id"],
                        parent["domain"], rec.to_dict(), None, cfg.rng_seed, parent["id"]))
    delta["ast_variants_emitted"] += len(out)
    return out


@dataclass
class SeedResult:
    seed_id: str
    rows: list[dict]
    reports: list[dict]
    delta: dict
    complete: bool = True  # False if an endpoint failure means a retry could add output

    def to_dict(self) -> dict:
        return {"seed_id": self.seed_id, "rows": self.rows, "reports": self.reports, "delta": self.delta}

    @classmethod
    def from_dict(cls, d: dict) -> "SeedResult":
        return cls(d["seed_id"], d["rows"], d["reports"], d["delta"])


def process_seed(seed: DatasetRecord, ordinal: int, cfg: PipelineConfig, backends: Backends,
                 verifier: Verifier, limiter: RateLimiter | None = None,
                 stats: CallStats | None = None) -> SeedResult:
    delta: Counter = Counter()
    cands: list[Candidate] = []
    if "domain" in cfg.methods:
        cands += evolve_domain(seed, cfg, backends.evolution, cfg.domain_calls_per_seed, limiter, stats, delta)
    if "difficulty" in cfg.methods and cfg.difficulty_calls_per_seed > 0:
        strats = schedule(ordinal, cfg.difficulty_calls_per_seed)
        cands += evolve_difficulty(seed, cfg, backends.evolution, strats, limiter, stats, delta)

    rows, reports = [], []
    for cand in cands:
        delta["llm_variants_raised"] += 1
        if cand.method is Method.DOMAIN:
            kept, _ = filter_domain([cand.variant], seed.domain_label)
            if not kept:
                delta["domain_filtered"] += 1
                continue
        delta["verify_in"] += 1
        report = verifier.verify(cand.variant.nl_description, cand.variant.formal_statement,
                                 cand.id, cand.method.value)
        reports.append(report.to_dict())
        delta["compile_pass" if report.compile.ok else "compile_fail"] += 1
        if report.repaired and report.repaired.compile and report.repaired.compile.ok:
            delta["repaired"] += 1
        if report.final is Final.ACCEPTED:
            delta["accepted"] += 1
        elif report.final is Final.REJECTED:
            delta[f"rejected_{report.reason}"] += 1
            continue
        else:
            delta["skipped"] += 1
            continue
        text = report.final_statement
        domain = cand.variant.domain if cand.method is Method.DOMAIN else seed.domain_label
        prov = EvolutionRecord(seed.id, cand.method, text, None, [], cand.metadata, Status.VERIFIED)
        rows.append(_row(cand.id, text, cand.variant.nl_description, cand.method.value, seed.id,
                         domain, prov.to_dict(), report.summary(), cfg.rng_seed))

    seed_row = _row(seed.id, seed.formal_statement, seed.nl_description, "Seed", seed.id,
                    seed.domain_label, None, None, cfg.rng_seed)
    out = []
    if cfg.emit_seeds:
        delta["seeds_emitted"] += 1
        out.append(seed_row)
    if "ast" in cfg.methods:
        parents = list(rows)
        if cfg.ast_on_seeds:
            parents.insert(0, seed_row)
        for p in parents:
            extra = ast_rows(p, cfg, delta)
            if p is seed_row:
                out.extend(extra)
            else:
                out.append(p)
                out.extend(extra)
    else:
        out.extend(rows)
    complete = delta["llm_call_failures"] == 0 and delta["skipped"] == 0
    return SeedResult(seed.id, out, reports, dict(delta), complete)


# ---------------------------------------------------------------------------
# journal


def config_digest(cfg: PipelineConfig) -> str:
    d = cfg.to_dict()
    for k in ("input", "output", "mock"):
        d.pop(k, None)
    return hashlib.sha256(dumps(d).encode("utf-8")).hexdigest()[:16]


class Journal:
    def __init__(self, path: Path, digest: str):
        self.path = path
        self.digest = digest
        self._lock = threading.Lock()

    def load(self) -> dict[str, SeedResult]:
        done: dict[str, SeedResult] = {}
        if not self.path.exists():
            return done
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn final line from an interrupted write
                if entry.get("config") != self.digest:
                    continue
                res = SeedResult.from_dict(entry["result"])
                done[res.seed_id] = res
        return done

    def append(self, res: SeedResult) -> None:
        line = dumps({"config": self.digest, "result": res.to_dict()})
        with self._lock, self.path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()


# ---------------------------------------------------------------------------
# driver


@dataclass
class RunResult:
    stats: FunnelStats
    corpus_path: Path
    rows: list[dict] = field(default_factory=list)


def select_seeds(records: list[DatasetRecord], cfg: PipelineConfig) -> list[DatasetRecord]:
    if cfg.sample is None or cfg.sample >= len(records):
        return records
    idx = sorted(random.Random(cfg.rng_seed).sample(range(len(records)), cfg.sample))
    return [records[i] for i in idx]


def load_benchmarks(paths) -> list[DatasetRecord]:
    out = []
    for p in paths:
        recs, _ = load_records(p)
        out.extend(recs)
    return out


def run_pipeline(cfg: PipelineConfig, backends: Backends | None = None,
                 stop_after: int | None = None) -> RunResult:
    """Run all phases and write corpus.jsonl, stats.json, verification.jsonl, drops.jsonl.

    ``stop_after`` processes only that many new seeds and then raises
    ``KeyboardInterrupt``, which is how interruption is simulated in tests.
    """
    backends = backends or make_backends(cfg)
    out_dir = Path(cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats = FunnelStats()

    records, ingest_report = load_records(cfg.input, cfg.input_format)
    seeds = select_seeds(records, cfg)
    stats.seeds_in = len(seeds)
    benchmarks = load_benchmarks(cfg.benchmarks)
    if benchmarks:
        dec = decontaminate(seeds, benchmarks, text_of=lambda r: r.formal_statement, id_of=lambda r: r.id)
        seed_drops = dec.drops
        seeds = dec.kept
    else:
        seed_drops = []
    stats.seeds_decontaminated = len(seed_drops)
    stats.seeds_evolved = len(seeds)
    stats.domain_before = histogram(s.domain_label for s in seeds)

    limiter = RateLimiter.for_config(cfg.evolution_llm)
    call_stats = CallStats()
    verifier = Verifier(backends.compile, cfg.judge_llm, backends.judge, limiter, call_stats,
                        cfg.judge_llm.temperature, frozenset(cfg.skip_difficulty_judge_for))

    journal = Journal(out_dir / JOURNAL, config_digest(cfg))
    if not cfg.resume and journal.path.exists():
        journal.path.unlink()
    done = journal.load() if cfg.resume else {}
    todo = [(i, s) for i, s in enumerate(seeds) if s.id not in done]
    if stop_after is not None:
        todo = todo[:stop_after]
    log.info("%d seeds, %d already journaled, %d to process", len(seeds), len(done), len(todo))

    results: dict[str, SeedResult] = dict(done)

    def work(item):
        i, s = item
        res = process_seed(s, i, cfg, backends, verifier, limiter, call_stats)
        if res.complete:
            journal.append(res)
        return res

    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        for res in pool.map(work, todo):
            results[res.seed_id] = res
    if stop_after is not None and len(results) < len(seeds):
        raise KeyboardInterrupt(f"stopped after {stop_after} seeds")

    rows, reports = [], []
    for s in seeds:
        res = results[s.id]
        stats.merge(res.delta)
        rows.extend(res.rows)
        reports.extend(res.reports)

    drops = [{"kind": "decontamination", "id": a, "match": b} for a, b in seed_drops]
    if cfg.dedup:
        preload = {} if cfg.emit_seeds else {statement_key(s.formal_statement): s.id for s in seeds}
        rows, dd = dedup(rows, preload=preload)
        stats.dedup_drops = len(dd)
        drops += [{"kind": "duplicate", "id": a, "match": b} for a, b in dd]
    if benchmarks:
        dec = decontaminate(rows, benchmarks)
        rows = dec.kept
        stats.outputs_decontaminated = len(dec.drops)
        drops += [{"kind": "decontamination", "id": a, "match": b} for a, b in dec.drops]
        drops += [{"kind": "near-duplicate-advisory", "id": a, "match": b} for a, b in dec.advisory]
    stats.output_records = len(rows)
    stats.domain_after = histogram(r["domain"] for r in rows)

    corpus = out_dir / "corpus.jsonl"
    write_jsonl(corpus, rows)
    write_jsonl(out_dir / "verification.jsonl", reports)
    write_jsonl(out_dir / "drops.jsonl", drops)
    payload = {"schema_version": SCHEMA_VERSION, "rng_seed": cfg.rng_seed, "config": config_digest(cfg),
               "ingest_skipped": ingest_report.skipped, **stats.to_dict()}
    (out_dir / "stats.json").write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")
    bad = stats.violations()
    if bad:
        log.error("funnel conservation violated: %s", "; ".join(bad))
    return RunResult(stats, corpus, rows)


# ---------------------------------------------------------------------------
# stats helpers


def llm_classifier(cfg: PipelineConfig, backend: Backend) -> Callable[[dict], Optional[str]]:
    domains = DomainList(cfg.domains)

    def classify(row: dict) -> Optional[str]:
        prompt = render_classify_prompt(row.get("nl_description") or "", row["formal_statement"], domains)
        try:
            text = call_llm(prompt, cfg.judge_llm, backend, temperature=0.0)
        except EndpointError:
            return None
        for label, body in fenced_blocks(text):
            if label.casefold() == "domain":
                return domains.lookup(body.strip())
        return domains.lookup(text.strip())

    return classify
