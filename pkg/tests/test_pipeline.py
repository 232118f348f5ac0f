import hashlib
import json
from collections import Counter
from dataclasses import replace
from pathlib import Path

import pytest

from leanevol.engine import EngineConfig
from leanevol.llm import MockBackend
from leanevol.llm.mock import MockLLM, perturb
from leanevol.pipeline import (
    Backends, DatasetRecord, FunnelStats, PipelineConfig, config_from_dict, decontaminate, dedup,
    histogram, load_config, load_records, run_pipeline,
)
from leanevol.pipeline.records import read_jsonl, write_jsonl
from leanevol.pipeline.run import schedule
from leanevol.pipeline.stats import apply_review, deltas, label_records
from leanevol.verify import MockCompiler

FIXTURES = Path(__file__).parent / "fixtures"
SEEDS = FIXTURES / "worked_seeds.jsonl"


def mock_cfg(tmp_path, name="out", **kw):
    base = dict(input=str(SEEDS), output=str(tmp_path / name), mock=True, jobs=1, rng_seed=7)
    base.update(kw)
    return PipelineConfig(**base)


def synthetic_seeds(path, n):
    rows = [{"id": f"s{k:02d}", "formal_statement": f"theorem s{k} (x : ℝ) (h : x = {k}) : x * 2 = {2 * k} := by sorry",
             "nl_description": f"seed {k}"} for k in range(n)]
    write_jsonl(path, rows)
    return rows


# ---------------------------------------------------------------------------
# ingestion


def test_ingest_jsonl_with_bad_line(tmp_path):
    p = tmp_path / "in.jsonl"
    p.write_text('{"id": "a", "formal_statement": "theorem a : 1 = 1 := by sorry"}\n'
                 '{"id": "b", "nl_description": "no statement"}\n'
                 '{"id": "c", "formal_statement": "theorem c : 2 = 2 := by sorry", "domain": "Algebra"}\n',
                 encoding="utf-8")
    recs, report = load_records(p)
    assert [r.id for r in recs] == ["a", "c"]
    assert report.records == 2 and report.skipped == 1
    assert "missing formal_statement" in report.diagnostics[0]
    assert recs[1].domain_label == "Algebra"


def test_ingest_lean_directory(tmp_path):
    (tmp_path / "sub").mkdir()
    (tmp_path / "one.lean").write_text("theorem one : 1 = 1 := by sorry\n", encoding="utf-8")
    (tmp_path / "sub" / "two.lean").write_text("theorem two : 2 = 2 := by sorry\n", encoding="utf-8")
    (tmp_path / "many.lean").write_text("theorem x : 1 = 1 := by sorry\ntheorem y : 1 = 1 := by sorry\n",
                                        encoding="utf-8")
    recs, report = load_records(tmp_path)
    assert [r.id for r in recs] == ["one.lean", "sub/two.lean"]
    assert report.skipped == 1


def test_ingest_missing_input(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_records(tmp_path / "nope.jsonl")


# ---------------------------------------------------------------------------
# curation


def _row(rid, text):
    return {"id": rid, "formal_statement": text}


def test_dedup_alpha_equivalence_and_idempotence():
    rows = [
        _row("a", "theorem a (x y : ℝ) (h : x < y) : x + 1 < y + 1 := by sorry"),
        _row("b", "theorem b (u v : ℝ) (k : u < v) : u + 1 < v + 1 := by sorry"),
        _row("c", "theorem c (x y : ℝ) (h : x < y) : 1 + x < y + 1 := by sorry"),
        _row("d", "theorem d  (x y : ℝ)   (h : x < y) : x + 1 < y + 1 := by sorry"),
    ]
    kept, drops = dedup(rows)
    assert [r["id"] for r in kept] == ["a", "c"]
    assert drops == [("b", "a"), ("d", "a")]
    again, none = dedup(kept)
    assert again == kept and none == []


def test_decontamination():
    bench = [DatasetRecord("B1", "theorem b1 (x : ℝ) (h : 0 < x) : 0 < x ^ 2 := by sorry"),
             DatasetRecord("B2", "theorem b2 (n : ℕ) : n + 0 = n := by sorry"),
             DatasetRecord("B3", "theorem b3 (p q : Prop) (hp : p) (hq : q) : p ∧ q := by sorry")]
    renamed = [_row("r1", "theorem z (y : ℝ) (k : 0 < y) : 0 < y ^ 2 := by sorry"),
               _row("r2", "theorem z (m : ℕ) : m + 0 = m := by sorry"),
               _row("r3", "theorem z (a b : Prop) (ha : a) (hb : b) : a ∧ b := by sorry")]
    res = decontaminate(renamed, bench)
    assert sorted(res.drops) == [("r1", "B1"), ("r2", "B2"), ("r3", "B3")] and res.kept == []

    disjoint = [_row("d1", "theorem d (x : ℝ) : x = x := by sorry")]
    assert decontaminate(disjoint, bench).drops == []

    commuted = [_row("c1", "theorem z (n : ℕ) : 0 + n = n := by sorry"),
                _row("c2", "theorem z (p q : Prop) (hq : q) (hp : p) : q ∧ p := by sorry")]
    res = decontaminate(commuted, bench)
    assert res.drops == [] and [r["id"] for r in res.kept] == ["c1", "c2"]
    assert sorted(res.advisory) == [("c1", "B2"), ("c2", "B3")]


# ---------------------------------------------------------------------------
# stats


def test_histogram_and_deltas():
    assert histogram(["Algebra", "Geometry", "Algebra", "Algebra"]) == {"Algebra": 3, "Geometry": 1}
    assert histogram([]) == {}
    assert histogram([None, "Algebra"]) == {"Algebra": 1, "Unlabeled": 1}
    assert deltas({"Algebra": 3, "Geometry": 1}, {"Algebra": 2, "Calculus": 4}) == [
        ("Algebra", 3, 2, -1), ("Calculus", 0, 4, 4), ("Geometry", 1, 0, -1)]


def test_conservation_violation_detected():
    s = FunnelStats(seeds_in=2, seeds_evolved=1)
    assert any(v.startswith("seeds") for v in s.violations())
    assert FunnelStats().violations() == []


def test_label_records_and_review(tmp_path):
    rows = [{"id": "a", "domain": "Algebra", "formal_statement": "x"},
            {"id": "b", "domain": None, "formal_statement": "y"},
            {"id": "c", "formal_statement": "z"}]
    csv_path = tmp_path / "review.csv"
    labels = label_records(rows, classify=lambda r: "Geometry", review_csv=csv_path)
    assert labels == ["Algebra", "Geometry", "Geometry"]
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "id,predicted_domain,decision" and len(lines) == 3
    csv_path.write_text("id,predicted_domain,decision\nb,Calculus,keep\nc,Geometry,drop\n", encoding="utf-8")
    out = apply_review(dict(zip("abc", labels)), csv_path)
    assert out == {"a": "Algebra", "b": "Calculus", "c": None}


# ---------------------------------------------------------------------------
# config


def test_config_toml_and_json(tmp_path):
    (tmp_path / "c.toml").write_text(
        'input = "seeds.jsonl"\nmethods = ["ast"]\nrng_seed = 11\n'
        '[engine]\np = "1/3"\nenabled_rules = ["Commutativity"]\n'
        '[compiler]\ncommand = "lean"\ntimeout = 5\n', encoding="utf-8")
    cfg = load_config(tmp_path / "c.toml")
    assert cfg.input == str(tmp_path / "seeds.jsonl") and cfg.methods == ("ast",)
    assert str(cfg.engine.p) == "1/3" and cfg.compiler.command == ("lean",) and cfg.compiler.timeout == 5
    (tmp_path / "c.json").write_text(json.dumps({"methods": ["domain"], "domain_calls_per_seed": 3}), encoding="utf-8")
    assert load_config(tmp_path / "c.json").domain_calls_per_seed == 3
    with pytest.raises(ValueError):
        config_from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        config_from_dict({"methods": ["telepathy"]})


def test_difficulty_schedule_round_robin():
    first = [(s.id, s.direction) for s in schedule(0, 10)]
    assert first == [(k, d) for k in range(1, 6) for d in (1, -1)]
    assert [(s.id, s.direction) for s in schedule(1, 3)] == [(2, -1), (3, 1), (3, -1)]


# ---------------------------------------------------------------------------
# end-to-end with mocks


def _digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def test_determinism(tmp_path):
    a = run_pipeline(mock_cfg(tmp_path, "a", jobs=4))
    b = run_pipeline(mock_cfg(tmp_path, "b", jobs=1))
    assert _digest(a.corpus_path) == _digest(b.corpus_path)
    assert (tmp_path / "a" / "stats.json").read_bytes() == (tmp_path / "b" / "stats.json").read_bytes()
    c = run_pipeline(mock_cfg(tmp_path, "c", rng_seed=8))
    assert _digest(a.corpus_path) != _digest(c.corpus_path)


def test_resume_matches_uninterrupted_run(tmp_path):
    full = run_pipeline(mock_cfg(tmp_path, "full"))
    cfg = mock_cfg(tmp_path, "resumed")
    with pytest.raises(KeyboardInterrupt):
        run_pipeline(cfg, stop_after=2)
    assert len((tmp_path / "resumed" / "journal.jsonl").read_text(encoding="utf-8").splitlines()) == 2
    counting = MockBackend(MockLLM())
    backends = Backends(counting, counting, MockCompiler())
    resumed = run_pipeline(cfg, backends=backends)
    assert _digest(full.corpus_path) == _digest(resumed.corpus_path)
    assert resumed.stats.to_dict() == full.stats.to_dict()
    # only the two unfinished seeds were sent to the model again
    domain_calls = [c for c in counting.calls if c.startswith("Your task is to start")]
    assert len(domain_calls) == 2


def test_config_change_invalidates_journal(tmp_path):
    cfg = mock_cfg(tmp_path)
    run_pipeline(cfg)
    counting = MockBackend(MockLLM())
    run_pipeline(replace(cfg, domain_calls_per_seed=2), backends=Backends(counting, counting, MockCompiler()))
    assert sum(c.startswith("Your task is to start") for c in counting.calls) == 8


def test_scripted_funnel_conservation(tmp_path):
    """100 verified candidates with a known mix of outcomes."""
    seeds = synthetic_seeds(tmp_path / "seeds.jsonl", 50)
    outcome = {}
    for s in seeds:
        for i in (1, 2):
            outcome[perturb(s["formal_statement"], i, "dom")] = ("accept", "syntax", "consistency",
                                                                 "correctness", "difficulty")[
                int(hashlib.sha256(f"{s['id']}{i}".encode()).hexdigest(), 16) % 5]
    expected = Counter(outcome.values())

    def verdicts(aspect, nl, stmt):
        bad = outcome[stmt] == aspect
        return {"consistency": "Inconsistent" if bad else "Consistent",
                "correctness": "Incorrect" if bad else "Correct",
                "difficulty": "Yes" if bad else "No"}[aspect]

    llm = MockBackend(MockLLM(verdicts=verdicts))
    compiler = MockCompiler(outcome=lambda s: outcome.get(s) != "syntax")
    cfg = PipelineConfig(input=str(tmp_path / "seeds.jsonl"), output=str(tmp_path / "out"),
                         methods=("domain",), mock=True, jobs=3)
    res = run_pipeline(cfg, backends=Backends(llm, llm, compiler))
    s = res.stats
    assert s.violations() == []
    assert s.llm_variants_raised == s.verify_in == 100
    assert s.accepted == expected["accept"] == s.output_records
    assert s.rejected_syntax == expected["syntax"] == s.compile_fail
    assert s.rejected_consistency == expected["consistency"]
    assert s.rejected_correctness == expected["correctness"]
    assert s.rejected_difficulty == expected["difficulty"]
    assert len(read_jsonl(tmp_path / "out" / "verification.jsonl")) == 100


def test_ten_seed_conservation_with_endpoint_failures(tmp_path):
    synthetic_seeds(tmp_path / "seeds.jsonl", 10)
    evo = MockBackend(MockLLM(), fail_first=7)
    judge = MockBackend(MockLLM())
    cfg = PipelineConfig(input=str(tmp_path / "seeds.jsonl"), output=str(tmp_path / "out"), mock=True, jobs=1)
    cfg = replace(cfg, evolution_llm=replace(cfg.evolution_llm, max_retries=1, backoff_base=0.0))
    res = run_pipeline(cfg, backends=Backends(evo, judge, MockCompiler()))
    assert res.stats.violations() == []
    assert res.stats.llm_call_failures >= 1
    assert res.stats.seeds_in == res.stats.seeds_evolved == 10


def test_fan_out_and_provenance(tmp_path):
    res = run_pipeline(mock_cfg(tmp_path))
    rows = res.rows
    seed_ids = {r["id"] for r in read_jsonl(SEEDS)}
    assert res.stats.violations() == []
    transfer = [r for r in rows if r["seed_id"] == "transfer_seed"]
    accepted = [r for r in transfer if r["method"] in ("Domain", "Difficulty")]
    assert len(accepted) >= 2
    for parent in accepted:
        assert any(r["parent_id"] == parent["id"] and r["method"] == "AST" for r in transfer)
    for r in rows:
        assert r["seed_id"] in seed_ids
        assert r["schema_version"] == 1 and r["rng_seed"] == 7
        if r["method"] == "AST":
            assert r["verification"] is None
            assert r["provenance"]["seed_statement_id"] == r["seed_id"]
            assert r["provenance"]["status"] == "Verified"
        else:
            assert r["verification"]["final"] == "Accepted"
    ids = [r["id"] for r in rows]
    assert len(ids) == len(set(ids))


def test_benchmark_decontamination_of_seeds_and_outputs(tmp_path):
    bench = tmp_path / "bench.jsonl"
    write_jsonl(bench, [{"id": "B", "formal_statement":
                         "theorem other (a b : ℝ) (p₀ : a * b = 4) (p₁ : a > b) (p₂ : a^3 - b^3 = 3555) : "
                         "a^2 + b^2 = 233 := by sorry"}])
    res = run_pipeline(mock_cfg(tmp_path, benchmarks=(str(bench),)))
    s = res.stats
    assert s.seeds_decontaminated == 1 and s.seeds_evolved == 3
    assert all(r["seed_id"] != "reorder_seed" for r in res.rows)
    drops = read_jsonl(tmp_path / "out" / "drops.jsonl")
    assert {"kind": "decontamination", "id": "reorder_seed", "match": "B"} in drops
    assert s.violations() == []


def test_ast_only_run_on_lean_directory(tmp_path):
    src = tmp_path / "lean"
    src.mkdir()
    (src / "a.lean").write_text("theorem a (x y : ℝ) (h : x < y) : x + 1 < y + 1 := by sorry\n", encoding="utf-8")
    cfg = PipelineConfig(input=str(src), output=str(tmp_path / "out"), methods=("ast",), mock=True, jobs=1,
                         engine=EngineConfig(p=1, variants_per_statement=3))
    res = run_pipeline(cfg)
    # p = 1 with a single hypothesis is deterministic, so the three draws collapse to one variant
    assert res.stats.llm_calls == 0 and res.stats.ast_variants_emitted == 1
    assert [r["formal_statement"] for r in res.rows] == [
        "theorem a_auged (x y : ℝ) (h : y > x) : 1 + y > 1 + x := by sorry"]
    assert res.rows[0]["id"].startswith("a.lean/ast")
