from .compiler import (
    CompileError, CompileResult, CompilerConfig, MockCompiler, ToolchainError,
    compile_batch, compile_check, make_compiler, parse_diagnostics,
)
from .funnel import Final, RepairRecord, VerificationReport, Verifier, verify
from .judge import Aspect, JudgeVerdict, RepairOutcome, Verdict, extract_repair, judge, parse_verdict, repair

__all__ = [
    "Aspect", "CompileError", "CompileResult", "CompilerConfig", "Final", "JudgeVerdict",
    "MockCompiler", "RepairOutcome", "RepairRecord", "ToolchainError", "Verdict",
    "VerificationReport", "Verifier", "compile_batch", "compile_check", "extract_repair",
    "judge", "make_compiler", "parse_diagnostics", "parse_verdict", "repair", "verify",
]
