"""compile -> (repair -> recompile) -> judges, with full provenance."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..llm.client import Backend, CallStats, EndpointError, LlmEndpointConfig, RateLimiter
from .compiler import CompileResult
from .judge import JUDGE_ORDER, Aspect, JudgeVerdict, Verdict, judge, repair

log = logging.getLogger(__name__)


class Final(str, enum.Enum):
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"
    SKIPPED = "Skipped"


@dataclass
class RepairRecord:
    repaired_statement: Optional[str]
    compile: Optional[CompileResult]
    analysis: str = ""
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "repaired_statement": self.repaired_statement,
            "compile": self.compile.to_dict() if self.compile else None,
            "reason": self.reason,
        }


@dataclass
class VerificationReport:
    statement_id: str
    statement: str
    nl: str
    compile: Optional[CompileResult] = None
    repaired: Optional[RepairRecord] = None
    verdicts: list[JudgeVerdict] = field(default_factory=list)
    final: Final = Final.SKIPPED
    reason: Optional[str] = None

    @property
    def final_statement(self) -> str:
        if self.repaired is not None and self.repaired.repaired_statement is not None:
            return self.repaired.repaired_statement
        return self.statement

    def invariant_holds(self) -> bool:
        if self.final is not Final.ACCEPTED:
            return True
        compiled = (self.compile is not None and self.compile.ok) or (
            self.repaired is not None and self.repaired.compile is not None and self.repaired.compile.ok)
        passed = {v.aspect for v in self.verdicts if v.passed}
        return compiled and {Aspect.CONSISTENCY, Aspect.CORRECTNESS, Aspect.DIFFICULTY} <= passed

    def to_dict(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "final": self.final.value,
            "reason": self.reason,
            "compile": self.compile.to_dict() if self.compile else None,
            "repaired": self.repaired.to_dict() if self.repaired else None,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }

    def summary(self) -> dict:
        return {
            "final": self.final.value,
            "reason": self.reason,
            "compiled": bool(self.compile and self.compile.ok),
            "repaired": self.repaired is not None and self.repaired.repaired_statement is not None
                        and bool(self.repaired.compile and self.repaired.compile.ok),
            "verdicts": {v.aspect.value: v.verdict.value for v in self.verdicts},
        }


@dataclass
class Verifier:
    compile: Callable[[str], CompileResult]
    llm: LlmEndpointConfig
    backend: Optional[Backend] = None
    limiter: Optional[RateLimiter] = None
    stats: Optional[CallStats] = None
    judge_temperature: float = 0.0
    # methods for which the low-difficulty judge is skipped (e.g. {"Difficulty"})
    skip_difficulty_for: frozenset = frozenset()

    def _kw(self) -> dict:
        return {"temperature": self.judge_temperature, "limiter": self.limiter, "stats": self.stats}

    def verify(self, nl: str, stmt: str, statement_id: str = "", method: str | None = None) -> VerificationReport:
        report = VerificationReport(statement_id, stmt, nl)
        try:
            self._run(report, method)
        except EndpointError as exc:
            report.final, report.reason = Final.SKIPPED, f"endpoint: {exc}"
        return report

    def _run(self, report: VerificationReport, method: str | None) -> None:
        report.compile = self.compile(report.statement)
        if not report.compile.ok:
            out = repair(report.statement, report.compile.errors, self.llm, self.backend, **self._kw())
            rec = RepairRecord(out.statement, None, out.analysis, out.reason)
            report.repaired = rec
            if out.statement is None:
                report.final, report.reason = Final.REJECTED, "syntax"
                return
            rec.compile = self.compile(out.statement)
            if not rec.compile.ok:
                report.final, report.reason = Final.REJECTED, "syntax"
                return
        stmt = report.final_statement
        for aspect in JUDGE_ORDER:
            if aspect is Aspect.DIFFICULTY and method in self.skip_difficulty_for:
                # recorded as a pass so the acceptance invariant stays checkable
                report.verdicts.append(JudgeVerdict(aspect, Verdict.LOW_DIFFICULTY_NO, "judge disabled for method"))
                continue
            v = judge(report.nl, stmt, aspect, self.llm, self.backend, **self._kw())
            report.verdicts.append(v)
            if not v.passed:
                report.final, report.reason = Final.REJECTED, aspect.key
                return
        report.final = Final.ACCEPTED


def verify(pair: tuple[str, str], verifier: Verifier, statement_id: str = "",
           method: str | None = None) -> VerificationReport:
    nl, stmt = pair
    return verifier.verify(nl, stmt, statement_id, method)
