"""Funnel counters, domain histograms and the review-csv classifier."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

UNLABELED = "Unlabeled"

_COUNTERS = (
    "seeds_in", "seeds_decontaminated", "seeds_evolved",
    "llm_calls", "llm_call_failures", "llm_variants_raised", "response_diagnostics",
    "domain_filtered", "verify_in", "compile_pass", "compile_fail", "repaired",
    "accepted", "rejected_syntax", "rejected_consistency", "rejected_correctness",
    "rejected_difficulty", "skipped",
    "ast_inputs", "ast_unparseable", "ast_variants_emitted",
    "seeds_emitted", "dedup_drops", "outputs_decontaminated", "output_records",
)


@dataclass
class FunnelStats:
    seeds_in: int = 0
    seeds_decontaminated: int = 0
    seeds_evolved: int = 0
    llm_calls: int = 0
    llm_call_failures: int = 0
    llm_variants_raised: int = 0
    response_diagnostics: int = 0
    domain_filtered: int = 0
    verify_in: int = 0
    compile_pass: int = 0
    compile_fail: int = 0
    repaired: int = 0
    accepted: int = 0
    rejected_syntax: int = 0
    rejected_consistency: int = 0
    rejected_correctness: int = 0
    rejected_difficulty: int = 0
    skipped: int = 0
    ast_inputs: int = 0
    ast_unparseable: int = 0
    ast_variants_emitted: int = 0
    seeds_emitted: int = 0
    dedup_drops: int = 0
    outputs_decontaminated: int = 0
    output_records: int = 0
    domain_before: dict[str, int] = field(default_factory=dict)
    domain_after: dict[str, int] = field(default_factory=dict)

    @property
    def rejected(self) -> int:
        return (self.rejected_syntax + self.rejected_consistency
                + self.rejected_correctness + self.rejected_difficulty)

    @property
    def decontamination_drops(self) -> int:
        return self.seeds_decontaminated + self.outputs_decontaminated

    def merge(self, delta: dict) -> None:
        for k, v in delta.items():
            setattr(self, k, getattr(self, k) + v)

    def violations(self) -> list[str]:
        """Conservation checks between consecutive funnel stages."""
        out = []

        def check(name, lhs, rhs):
            if lhs != rhs:
                out.append(f"{name}: {lhs} != {rhs}")

        check("seeds", self.seeds_in, self.seeds_evolved + self.seeds_decontaminated)
        check("variants", self.llm_variants_raised, self.verify_in + self.domain_filtered)
        check("verification", self.verify_in, self.accepted + self.rejected + self.skipped)
        check("compile", self.verify_in, self.compile_pass + self.compile_fail)
        check("outputs", self.output_records,
              self.accepted + self.ast_variants_emitted + self.seeds_emitted
              - self.dedup_drops - self.outputs_decontaminated)
        check("histogram after", sum(self.domain_after.values()), self.output_records)
        check("histogram before", sum(self.domain_before.values()), self.seeds_evolved)
        return out

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in _COUNTERS}
        d["rejected"] = self.rejected
        d["decontamination_drops"] = self.decontamination_drops
        d["domain_before"] = dict(sorted(self.domain_before.items()))
        d["domain_after"] = dict(sorted(self.domain_after.items()))
        return d

    def table(self) -> str:
        rows = [(k, str(getattr(self, k))) for k in _COUNTERS]
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
        hist = histogram_table(self.domain_before, self.domain_after)
        return "\n".join(lines) + "\n\n" + hist


def histogram(labels: Iterable[Optional[str]]) -> dict[str, int]:
    return dict(sorted(Counter(l or UNLABELED for l in labels).items()))


def deltas(before: dict[str, int], after: dict[str, int]) -> list[tuple[str, int, int, int]]:
    keys = sorted(set(before) | set(after))
    return [(k, before.get(k, 0), after.get(k, 0), after.get(k, 0) - before.get(k, 0)) for k in keys]


def histogram_table(before: dict[str, int], after: dict[str, int]) -> str:
    rows = deltas(before, after)
    if not rows:
        return "(no domain labels)"
    width = max(len("domain"), *(len(k) for k, *_ in rows))
    tb, ta = sum(before.values()) or 1, sum(after.values()) or 1
    lines = [f"{'domain'.ljust(width)}  {'before':>7} {'share':>6}  {'after':>7} {'share':>6}  {'delta':>7}"]
    for k, b, a, d in rows:
        lines.append(f"{k.ljust(width)}  {b:>7} {b / tb:>6.1%}  {a:>7} {a / ta:>6.1%}  {d:>+7}")
    return "\n".join(lines)


def label_records(rows: list[dict], classify: Optional[Callable[[dict], Optional[str]]] = None,
                  review_csv: Optional[Path] = None) -> list[Optional[str]]:
    """Domain label per row; unlabeled rows go through ``classify`` when given.

    Classified rows are written to ``review_csv`` with an editable decision
    column so a person can confirm or overrule each label.
    """
    labels, review = [], []
    for r in rows:
        label = r.get("domain") or r.get("domain_label")
        if not label and classify is not None:
            label = classify(r)
            review.append((r.get("id", ""), label or "", "keep"))
        labels.append(label)
    if review_csv is not None and review:
        with Path(review_csv).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["id", "predicted_domain", "decision"])
            w.writerows(review)
    return labels


def apply_review(labels: dict[str, Optional[str]], review_csv: Path) -> dict[str, Optional[str]]:
    """Fold a reviewed csv back in: ``drop`` clears a label, an edited domain replaces it."""
    out = dict(labels)
    with Path(review_csv).open(encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["decision"].strip().lower() == "drop":
                out[row["id"]] = None
            else:
                out[row["id"]] = row["predicted_domain"] or None
    return out
