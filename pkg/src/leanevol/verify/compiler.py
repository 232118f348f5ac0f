"""Lean compiler check: scratch files, subprocess, diagnostic parsing."""

from __future__ import annotations

import logging
import os
import re
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional, Sequence

from ..syntax import ParseError, parse_statement

log = logging.getLogger(__name__)


class ToolchainError(RuntimeError):
    """The compiler could not be run at all (missing binary, bad workspace)."""


@dataclass(frozen=True)
class CompileError:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"

    def to_dict(self) -> dict:
        return {"line": self.line, "column": self.column, "message": self.message, "severity": self.severity}


@dataclass
class CompileResult:
    ok: bool
    errors: list[CompileError] = field(default_factory=list)
    elapsed: float = 0.0
    toolchain: str = ""
    warnings: list[CompileError] = field(default_factory=list)

    def __post_init__(self):
        if self.ok and self.errors:
            raise ValueError("a passing compile cannot carry errors")

    def error_text(self) -> str:
        return "\n".join(str(e) for e in self.errors)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "errors": [e.to_dict() for e in self.errors],
            "warnings": len(self.warnings),
            "elapsed": round(self.elapsed, 3),
            "toolchain": self.toolchain,
        }


@dataclass(frozen=True)
class CompilerConfig:
    command: tuple[str, ...] = ("lake", "env", "lean")
    workspace: str = "."
    timeout: float = 60.0
    header: str = "import Mathlib"
    batch_size: int = 16
    mock: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "CompilerConfig":
        kw = dict(d)
        if isinstance(kw.get("command"), str):
            kw["command"] = tuple(kw["command"].split())
        elif "command" in kw:
            kw["command"] = tuple(kw["command"])
        return cls(**kw)


_DIAG = re.compile(
    r"^(?P<file>.+?):(?P<line>\d+):(?P<col>\d+): (?P<sev>error|warning|info)(?:\([^)]*\))?: ",
    re.M,
)


def parse_diagnostics(output: str) -> list[tuple[str, CompileError]]:
    """(file, diagnostic) pairs; a message runs until the next diagnostic line."""
    out = []
    matches = list(_DIAG.finditer(output))
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(output)
        msg = output[m.end():end].rstrip()
        out.append((m.group("file"), CompileError(int(m.group("line")), int(m.group("col")), msg, m.group("sev"))))
    return out


def _lift_imports(stmt: str) -> tuple[list[str], str]:
    imports, rest = [], []
    for line in stmt.splitlines():
        (imports if line.startswith("import ") else rest).append(line)
    return imports, "\n".join(rest)


@lru_cache(maxsize=8)
def toolchain_version(command: tuple[str, ...], workspace: str) -> str:
    try:
        r = subprocess.run([*command, "--version"], cwd=workspace, capture_output=True, text=True, timeout=120)
    except FileNotFoundError as exc:
        raise ToolchainError(f"compiler not found: {command[0]!r} ({exc})") from exc
    except subprocess.TimeoutExpired as exc:
        raise ToolchainError("compiler --version timed out") from exc
    return (r.stdout or r.stderr).strip().splitlines()[0] if (r.stdout or r.stderr).strip() else "unknown"


def _run(source: str, cfg: CompilerConfig, timeout: float) -> tuple[str, int, float]:
    ws = Path(cfg.workspace)
    if not ws.is_dir():
        raise ToolchainError(f"workspace {cfg.workspace!r} does not exist")
    scratch = ws / ".leanevol_scratch"
    scratch.mkdir(exist_ok=True)
    fd, path = tempfile.mkstemp(suffix=".lean", dir=scratch)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(source)
        t0 = time.monotonic()
        try:
            r = subprocess.run([*cfg.command, path], cwd=ws, capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError as exc:
            raise ToolchainError(f"compiler not found: {cfg.command[0]!r} ({exc})") from exc
        return r.stdout + r.stderr, r.returncode, time.monotonic() - t0
    finally:
        os.unlink(path)


def _result(diags: list[CompileError], returncode: int, raw: str, elapsed: float, version: str,
            offset: int) -> CompileResult:
    errors = [CompileError(d.line - offset, d.column, d.message, d.severity) for d in diags if d.severity == "error"]
    warnings = [CompileError(d.line - offset, d.column, d.message, d.severity) for d in diags if d.severity == "warning"]
    if returncode != 0 and not errors:
        errors.append(CompileError(0, 0, raw.strip()[:500] or f"compiler exited with {returncode}"))
    return CompileResult(not errors, errors, elapsed, version, warnings)


def compile_check(stmt: str, cfg: CompilerConfig) -> CompileResult:
    """Compile one statement under ``cfg.header``; ``sorry`` warnings pass."""
    version = toolchain_version(cfg.command, cfg.workspace)
    imports, body = _lift_imports(stmt)
    head = "\n".join([cfg.header, *imports]) if cfg.header else "\n".join(imports)
    prefix = f"{head}\n\n" if head else ""
    offset = prefix.count("\n")
    try:
        raw, code, elapsed = _run(prefix + body + "\n", cfg, cfg.timeout)
    except subprocess.TimeoutExpired:
        return CompileResult(False, [CompileError(0, 0, "timeout")], cfg.timeout, version)
    return _result([d for _, d in parse_diagnostics(raw)], code, raw, elapsed, version, offset)


def compile_batch(stmts: Sequence[str], cfg: CompilerConfig) -> list[CompileResult]:
    """Check several statements in one compiler run.

    Each statement goes in its own namespace so theorem names cannot clash.
    Statements that fail in the batch are re-checked alone, since a syntax
    error can spill into the next block.
    """
    if not stmts:
        return []
    version = toolchain_version(cfg.command, cfg.workspace)
    imports: list[str] = []
    blocks: list[str] = []
    for i, s in enumerate(stmts):
        imp, body = _lift_imports(s)
        imports.extend(x for x in imp if x not in imports)
        blocks.append(f"namespace LeanevolBatch{i}\n{body}\nend LeanevolBatch{i}")
    head = "\n".join([cfg.header, *imports]) if cfg.header else "\n".join(imports)
    source = head + "\n\n"
    ranges = []
    line = source.count("\n") + 1
    for b in blocks:
        n = b.count("\n") + 1
        ranges.append((line + 1, line + n - 1))  # body lines, first and last
        source += b + "\n\n"
        line += n + 1
    try:
        raw, code, elapsed = _run(source, cfg, cfg.timeout * len(stmts))
    except subprocess.TimeoutExpired:
        return [compile_check(s, cfg) for s in stmts]
    per: list[list[CompileError]] = [[] for _ in stmts]
    stray = False
    for _, d in parse_diagnostics(raw):
        for i, (lo, hi) in enumerate(ranges):
            if lo - 1 <= d.line <= hi + 1:
                per[i].append(CompileError(d.line - lo + 1, d.column, d.message, d.severity))
                break
        else:
            stray = stray or d.severity == "error"
    out = []
    share = elapsed / len(stmts)
    for i, s in enumerate(stmts):
        errors = [d for d in per[i] if d.severity == "error"]
        if errors or stray:
            out.append(compile_check(s, cfg))
        else:
            warnings = [d for d in per[i] if d.severity == "warning"]
            out.append(CompileResult(True, [], share, version, warnings))
    return out


# ---------------------------------------------------------------------------
# mock


class MockCompiler:
    """Stand-in compiler: a statement passes iff it parses, unless scripted.

    ``script`` maps a statement text to a fixed result; ``outcome`` is a
    fallback callable for rule-based scripting in tests.
    """

    toolchain = "mock"

    def __init__(self, outcome: Optional[Callable[[str], Optional[bool]]] = None,
                 script: Optional[dict[str, bool]] = None):
        self.outcome = outcome
        self.script = dict(script or {})
        self.calls: list[str] = []

    def __call__(self, stmt: str) -> CompileResult:
        self.calls.append(stmt)
        forced = self.script.get(stmt)
        if forced is None and self.outcome is not None:
            forced = self.outcome(stmt)
        try:
            parse_statement(stmt, preamble="keep")
            parse_err = None
        except ParseError as exc:
            parse_err = exc
        ok = parse_err is None if forced is None else forced
        if ok:
            return CompileResult(True, [], 0.0, self.toolchain)
        if parse_err is not None:
            err = CompileError(parse_err.line, parse_err.column,
                               f"unexpected token '{parse_err.found}'; expected {parse_err.expected}")
        else:
            err = CompileError(1, 0, "mock: scripted failure")
        return CompileResult(False, [err], 0.0, self.toolchain)


def make_compiler(cfg: CompilerConfig) -> Callable[[str], CompileResult]:
    if cfg.mock:
        return MockCompiler()
    return lambda stmt: compile_check(stmt, cfg)
