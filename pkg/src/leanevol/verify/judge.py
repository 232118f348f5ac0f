"""LLM semantic judges and the single repair attempt."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional

from ..llm.client import Backend, CallStats, LlmEndpointConfig, RateLimiter, call_llm
from ..llm.prompts import render_judge_prompt, render_repair_prompt
from ..llm.responses import ends_with_trailer, fenced_blocks
from .compiler import CompileError


class Aspect(str, enum.Enum):
    CONSISTENCY = "Consistency"
    CORRECTNESS = "Correctness"
    DIFFICULTY = "Difficulty"

    @property
    def key(self) -> str:
        return self.value.lower()


class Verdict(str, enum.Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    CORRECT = "Correct"
    INCORRECT = "Incorrect"
    LOW_DIFFICULTY_YES = "LowDifficulty-Yes"
    LOW_DIFFICULTY_NO = "LowDifficulty-No"


# aspect -> {token: verdict}, plus the verdict that lets a statement through
_TOKENS = {
    Aspect.CONSISTENCY: {"consistent": Verdict.CONSISTENT, "inconsistent": Verdict.INCONSISTENT},
    Aspect.CORRECTNESS: {"correct": Verdict.CORRECT, "incorrect": Verdict.INCORRECT},
    Aspect.DIFFICULTY: {"yes": Verdict.LOW_DIFFICULTY_YES, "no": Verdict.LOW_DIFFICULTY_NO},
}
_PASS = {
    Aspect.CONSISTENCY: Verdict.CONSISTENT,
    Aspect.CORRECTNESS: Verdict.CORRECT,
    Aspect.DIFFICULTY: Verdict.LOW_DIFFICULTY_NO,
}
_REJECT = {
    Aspect.CONSISTENCY: Verdict.INCONSISTENT,
    Aspect.CORRECTNESS: Verdict.INCORRECT,
    Aspect.DIFFICULTY: Verdict.LOW_DIFFICULTY_YES,
}

JUDGE_ORDER = (Aspect.CONSISTENCY, Aspect.CORRECTNESS, Aspect.DIFFICULTY)


@dataclass(frozen=True)
class JudgeVerdict:
    aspect: Aspect
    verdict: Verdict
    analysis: str = ""
    reason: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.verdict is _PASS[self.aspect] and self.reason is None

    def to_dict(self) -> dict:
        return {"aspect": self.aspect.value, "verdict": self.verdict.value,
                "passed": self.passed, "reason": self.reason}


def parse_verdict(response: str, aspect: Aspect) -> JudgeVerdict:
    blocks = fenced_blocks(response or "")
    analysis = next((b for l, b in reversed(blocks) if l.casefold() == "analysis"), "")
    judged = [b for l, b in blocks if l.casefold() == "judge"]
    if judged:
        token = re.sub(r"[^a-z]", "", judged[-1].casefold())
        verdict = _TOKENS[aspect].get(token)
        if verdict is not None:
            return JudgeVerdict(aspect, verdict, analysis)
    return JudgeVerdict(aspect, _REJECT[aspect], analysis, "unparseable verdict")


def judge(nl: str, stmt: str, aspect: Aspect, cfg: LlmEndpointConfig, backend: Backend | None = None,
          *, temperature: float = 0.0, limiter: RateLimiter | None = None,
          stats: CallStats | None = None) -> JudgeVerdict:
    prompt = render_judge_prompt(aspect.key, nl, stmt)
    text = call_llm(prompt, cfg, backend, temperature=temperature, limiter=limiter, stats=stats)
    return parse_verdict(text, aspect)


@dataclass(frozen=True)
class RepairOutcome:
    statement: Optional[str]
    analysis: str = ""
    reason: Optional[str] = None


def extract_repair(response: str) -> RepairOutcome:
    marker = (response or "").find("Corrected Lean4 Code")
    tail = response[marker:] if marker >= 0 else (response or "")
    blocks = fenced_blocks(tail)
    code = next((b for l, b in blocks if l.casefold() in ("lean4", "lean")), None)
    analysis = next((b for l, b in fenced_blocks(response or "") if l.casefold() == "analysis"), "")
    if code is None:
        return RepairOutcome(None, analysis, "no lean4 block")
    code = code.strip()
    if not ends_with_trailer(code):
        return RepairOutcome(None, analysis, "missing trailer")
    return RepairOutcome(code, analysis)


def format_errors(errors: list[CompileError]) -> str:
    return "\n".join(str(e) for e in errors)


def repair(stmt: str, errors: list[CompileError], cfg: LlmEndpointConfig, backend: Backend | None = None,
           *, temperature: float = 0.0, limiter: RateLimiter | None = None,
           stats: CallStats | None = None) -> RepairOutcome:
    """One repair attempt; the caller compiles the result."""
    prompt = render_repair_prompt(stmt, format_errors(errors))
    text = call_llm(prompt, cfg, backend, temperature=temperature, limiter=limiter, stats=stats)
    return extract_repair(text)
