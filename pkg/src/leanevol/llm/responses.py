"""Extracting variants and fenced blocks from model responses."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..syntax.nodes import TRAILER
from .prompts import DomainList

MAX_VARIANTS = 5

_FENCE = re.compile(r"```[ \t]*([^\n`]*)\n(.*?)\n?[ \t]*```", re.S)


@dataclass(frozen=True)
class Variant:
    nl_description: str
    formal_statement: str
    domain: Optional[str] = None


@dataclass
class ParseResult:
    variants: list[Variant] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.variants)

    def __len__(self) -> int:
        return len(self.variants)


def fenced_blocks(text: str) -> list[tuple[str, str]]:
    """(label, body) for every ```label ... ``` block, in order."""
    return [(m.group(1).strip(), m.group(2).strip("\n")) for m in _FENCE.finditer(text)]


def _kind(label: str) -> str:
    key = label.casefold().replace("_", " ")
    if key.startswith("nl") or "description" in key or key == "problem":
        return "nl"
    if "formal" in key or key in ("lean", "lean4"):
        return "formal"
    if key.startswith("domain"):
        return "domain"
    return "other"


def ends_with_trailer(stmt: str) -> bool:
    return " ".join(stmt.split()).endswith(TRAILER)


def parse_variants(response: str, expect_domain: bool,
                   domains: DomainList = DomainList()) -> ParseResult:
    """Group NL / formal / domain fences into variants; never raises."""
    result = ParseResult()
    blocks = fenced_blocks(response or "")
    if not blocks:
        result.diagnostics.append("no fenced blocks in response")
        return result
    groups: list[dict] = []
    cur: dict = {}
    for label, body in blocks:
        kind = _kind(label)
        if kind == "other":
            result.diagnostics.append(f"ignored block with label {label!r}")
            continue
        if kind in cur or (kind == "nl" and "formal" in cur):
            groups.append(cur)
            cur = {}
        cur[kind] = body.strip()
    if cur:
        groups.append(cur)

    for i, g in enumerate(groups, 1):
        formal = g.get("formal", "")
        if not formal:
            result.diagnostics.append(f"variant {i}: missing formal statement")
            continue
        if not ends_with_trailer(formal):
            result.diagnostics.append(f"variant {i}: missing trailer")
            continue
        domain = None
        if expect_domain:
            raw = g.get("domain")
            if raw is None:
                result.diagnostics.append(f"variant {i}: missing domain")
                continue
            domain = domains.lookup(raw.strip())
            if domain is None:
                result.diagnostics.append(f"variant {i}: unknown domain {raw.strip()!r}")
                continue
        if len(result.variants) >= MAX_VARIANTS:
            result.diagnostics.append(f"variant {i}: dropped, more than {MAX_VARIANTS} variants")
            continue
        result.variants.append(Variant(g.get("nl", ""), formal, domain))
    return result


def filter_domain(variants: list[Variant], source_domain: Optional[str]) -> tuple[list[Variant], list[str]]:
    """Drop domain variants that stay in the seed's own domain."""
    if not source_domain:
        return list(variants), []
    key = source_domain.casefold()
    kept, diags = [], []
    for v in variants:
        if v.domain is not None and v.domain.casefold() == key:
            diags.append(f"dropped variant in source domain {v.domain}")
        else:
            kept.append(v)
    return kept, diags


def render_variants(variants: list[Variant]) -> str:
    """Inverse of ``parse_variants`` in the format the prompts ask for."""
    parts = []
    for v in variants:
        parts.append(f"```NL Description\n{v.nl_description}\n```")
        parts.append(f"```Formal Statement\n{v.formal_statement}\n```")
        if v.domain is not None:
            parts.append(f"``` Domain\n{v.domain}\n```")
    return "\n".join(parts) + "\n"
