"""Deterministic stand-in for the model, used in tests and ``--mock`` runs.

The responder recognises which template a prompt came from and answers in
the format that template asks for.  Evolution answers perturb integer
literals of the original statement so outputs stay parseable and distinct.
"""

from __future__ import annotations

import hashlib
import re
from typing import Callable, Optional

from .prompts import DomainList
from .responses import Variant, fenced_blocks, render_variants

Verdicts = Callable[[str, str, str], str]  # (aspect, nl, stmt) -> verdict word

_INT = re.compile(r"(?<![\w.₀-₉])\d+(?![\w.])")
_NAME = re.compile(r"(theorem|lemma)\s+(\S+)")


def prompt_kind(prompt: str) -> str:
    head = prompt.lstrip()[:200]
    if head.startswith("Your task is to start with a given Lean 4"):
        return "domain"
    if head.startswith("Your task is to evolve a given formal statement into several, more complex"):
        return "difficulty_up"
    if head.startswith("Your task is to evolve a given formal statement into several, simpler"):
        return "difficulty_down"
    if head.startswith("Your task is to fix the code"):
        return "repair"
    if "Please judge if they are consistent" in head:
        return "consistency"
    if "Please judge if the mathematical statement is correct" in head:
        return "correctness"
    if "classify the difficulty of problem" in head:
        return "difficulty"
    if head.startswith("Classify the mathematical domain"):
        return "classify"
    return "unknown"


def _lean_blocks(prompt: str) -> list[str]:
    return [body for label, body in fenced_blocks(prompt) if label.casefold() in ("lean4", "lean")]


def _problem_block(prompt: str) -> str:
    for label, body in fenced_blocks(prompt):
        if label.casefold() == "problem":
            return body
    return ""


def _digest(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:4], "big")


def perturb(stmt: str, k: int, tag: str) -> str:
    """Shift every integer literal by ``k`` and rename the theorem."""
    out = _INT.sub(lambda m: str(int(m.group(0)) + k), stmt)
    return _NAME.sub(lambda m: f"{m.group(1)} {m.group(2)}_{tag}{k}", out, count=1)


def default_verdicts(aspect: str, nl: str, stmt: str) -> str:
    return {"consistency": "Consistent", "correctness": "Correct", "difficulty": "No"}[aspect]


class MockLLM:
    def __init__(self, domains: DomainList = DomainList(), variants_per_call: int = 2,
                 verdicts: Verdicts = default_verdicts,
                 repair: Optional[Callable[[str], Optional[str]]] = None,
                 classify: Optional[Callable[[str], str]] = None):
        self.domains = domains
        self.variants_per_call = variants_per_call
        self.verdicts = verdicts
        self.repair = repair
        self.classify = classify

    def __call__(self, prompt: str) -> str:
        kind = prompt_kind(prompt)
        blocks = _lean_blocks(prompt)
        stmt = blocks[0] if blocks else ""
        if kind == "domain":
            base = _digest(stmt)
            names = self.domains.names
            vs = [Variant(f"Prove the transferred statement {i + 1}.", perturb(stmt, i + 1, "dom"),
                          names[(base + i) % len(names)])
                  for i in range(self.variants_per_call)]
            return render_variants(vs)
        if kind in ("difficulty_up", "difficulty_down"):
            tag = "up" if kind == "difficulty_up" else "down"
            sign = 1 if tag == "up" else 2
            vs = [Variant(f"Prove the {tag} variant {i + 1}.", perturb(stmt, sign * 10 + i, tag))
                  for i in range(self.variants_per_call)]
            return render_variants(vs)
        if kind in ("consistency", "correctness", "difficulty"):
            word = self.verdicts(kind, _problem_block(prompt), stmt)
            return f"**Analysis:**\n```analysis\nmock analysis\n```\n**Judge Result:**\n```judge\n{word}\n```\n"
        if kind == "repair":
            fixed = self.repair(stmt) if self.repair else None
            if fixed is None:
                return "I could not repair this statement."
            return f"**Modification Analysis**\n```analysis\nmock\n```\n**Corrected Lean4 Code**\n```lean4\n{fixed}\n```\n"
        if kind == "classify":
            label = self.classify(stmt) if self.classify else self.domains.names[_digest(stmt) % len(self.domains.names)]
            return f"```domain\n{label}\n```\n"
        return "unrecognised prompt"
