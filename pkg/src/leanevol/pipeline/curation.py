"""Corpus-wide deduplication and benchmark decontamination."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from ..syntax import ParseError, parse_statement
from ..syntax.analysis import loose_hash, structural_hash, text_hash


def statement_key(text: str) -> str:
    """Alpha-normalized digest, or a whitespace-normalized text digest if unparseable."""
    try:
        return "s:" + structural_hash(parse_statement(text))
    except ParseError:
        return "t:" + text_hash(text)


def loose_key(text: str) -> Optional[str]:
    try:
        return loose_hash(parse_statement(text))
    except ParseError:
        return None


def dedup(items: Sequence, text_of: Callable = lambda r: r["formal_statement"],
          id_of: Callable = lambda r: r["id"], preload: Optional[dict[str, str]] = None):
    """Keep the first occurrence of each statement key.

    ``preload`` maps keys to the ids that already own them (e.g. the seeds),
    so later copies of those statements are dropped too.  Returns
    ``(kept, drops)`` where drops are ``(dropped id, kept id)`` pairs.
    """
    owner = dict(preload or {})
    kept, drops = [], []
    for it in items:
        k = statement_key(text_of(it))
        if k in owner:
            drops.append((id_of(it), owner[k]))
            continue
        owner[k] = id_of(it)
        kept.append(it)
    return kept, drops


@dataclass
class DecontaminationResult:
    kept: list
    drops: list[tuple[str, str]] = field(default_factory=list)
    advisory: list[tuple[str, str]] = field(default_factory=list)


def benchmark_index(benchmarks: Iterable) -> tuple[dict[str, str], dict[str, str]]:
    """(exact key -> benchmark id, loose key -> benchmark id) from DatasetRecords."""
    exact, loose = {}, {}
    for b in benchmarks:
        exact.setdefault(statement_key(b.formal_statement), b.id)
        lk = loose_key(b.formal_statement)
        if lk is not None:
            loose.setdefault(lk, b.id)
    return exact, loose


def decontaminate(corpus: Sequence, benchmarks: Iterable,
                  text_of: Callable = lambda r: r["formal_statement"],
                  id_of: Callable = lambda r: r["id"]) -> DecontaminationResult:
    """Drop corpus entries alpha-equivalent to a benchmark statement.

    Entries that only match up to commutativity, relation orientation or
    hypothesis order are kept but listed in ``advisory``.
    """
    exact, loose = benchmark_index(benchmarks)
    out = DecontaminationResult([])
    for it in corpus:
        text = text_of(it)
        hit = exact.get(statement_key(text))
        if hit is not None:
            out.drops.append((id_of(it), hit))
            continue
        lk = loose_key(text)
        if lk is not None and lk in loose:
            out.advisory.append((id_of(it), loose[lk]))
        out.kept.append(it)
    return out
