"""Syntactic carrier-type inference from binder annotations.

There is no elaborator here; anything not pinned down by an annotation, a
literal or a known function head is ``None`` (unknown), which disables the
arithmetic rules at that node.
"""

from __future__ import annotations

from typing import Mapping, Optional

from ..syntax.nodes import (
    App, BigOp, BinaryOp, Enclosed, Expr, Ident, NumLit, Postfix, QBinder,
    Typed, UnaryOp,
)

LIT = "lit"  # untyped numeric literal, unifies with any carrier
COMMUTATIVE = frozenset({"ℝ", "ℤ", "ℕ", "ℚ"})
_ALIASES = {"Real": "ℝ", "Int": "ℤ", "Nat": "ℕ", "Rat": "ℚ", "ℝ": "ℝ", "ℤ": "ℤ", "ℕ": "ℕ", "ℚ": "ℚ", "ℂ": "ℂ", "Complex": "ℂ"}

_REAL_FUNS = frozenset({
    "Real.sqrt", "Real.exp", "Real.log", "Real.sin", "Real.cos", "Real.tan",
    "Real.arctan", "Real.logb", "Real.cosh", "Real.sinh", "dist", "sqrt",
    "exp", "log", "sin", "cos", "tan", "arctan", "logb",
})
_NAT_FUNS = frozenset({
    "Nat.gcd", "Nat.lcm", "Nat.factorial", "Nat.choose", "Nat.fib",
    "Nat.totient", "Int.natAbs", "Int.gcd", "Int.toNat", "Nat.succ",
    "Nat.sqrt", "Finset.card",
})
_INT_FUNS = frozenset({"Int.floor", "Int.ceil", "Int.fdiv", "Int.emod"})
_REAL_CONSTS = frozenset({"π", "Real.pi"})

TypeEnv = Mapping[str, Optional[Expr]]


def carrier_name(t: Optional[Expr]) -> Optional[str]:
    if isinstance(t, Ident):
        return _ALIASES.get(t.name)
    return None


def unify(a: Optional[str], b: Optional[str]) -> Optional[str]:
    if a is None or b is None:
        return None
    if a == LIT:
        return b
    if b == LIT:
        return a
    return a if a == b else None


def extend(env: TypeEnv, binders: tuple[QBinder, ...]) -> TypeEnv:
    if not binders:
        return env
    out = dict(env)
    for b in binders:
        for n in b.names:
            out[n] = b.type
    return out


def _result_type(fn_type: Optional[Expr], nargs: int) -> Optional[str]:
    t = fn_type
    for _ in range(nargs):
        if isinstance(t, BinaryOp) and t.op == "→":
            t = t.rhs
        else:
            return None
    return carrier_name(t)


def infer(e: Expr, env: TypeEnv) -> Optional[str]:
    """Carrier of an arithmetic expression, ``LIT`` or ``None`` if unknown."""
    if isinstance(e, NumLit):
        return LIT
    if isinstance(e, Ident):
        if e.name in _REAL_CONSTS:
            return "ℝ"
        return carrier_name(env.get(e.name))
    if isinstance(e, Typed):
        return carrier_name(e.type)
    if isinstance(e, BinaryOp):
        if e.op in ("+", "-", "*", "/", "%"):
            return unify(infer(e.lhs, env), infer(e.rhs, env))
        if e.op == "^":
            return infer(e.lhs, env)
        return None
    if isinstance(e, UnaryOp):
        if e.op == "-":
            return infer(e.operand, env)
        if e.op == "√":
            return "ℝ"
        return None
    if isinstance(e, Postfix):
        if e.op == "!":
            return "ℕ"
        if e.op == "⁻¹":
            return infer(e.operand, env)
        return None
    if isinstance(e, Enclosed):
        if e.kind == "|":
            return infer(e.expr, env)
        return {"⌊": "ℤ", "⌈": "ℤ", "⌊₊": "ℕ", "⌈₊": "ℕ", "‖": "ℝ"}.get(e.kind)
    if isinstance(e, App):
        if e.head in _REAL_FUNS:
            return "ℝ"
        if e.head in _NAT_FUNS:
            return "ℕ"
        if e.head in _INT_FUNS:
            return "ℤ"
        if e.head == "abs" and len(e.args) == 1:
            return infer(e.args[0], env)
        if e.head in ("max", "min") and len(e.args) == 2:
            return unify(infer(e.args[0], env), infer(e.args[1], env))
        if e.head in env:
            return _result_type(env[e.head], len(e.args))
        return None
    if isinstance(e, BigOp):
        if e.kind == "∫":
            return "ℝ"
        b = e.binder
        ty = b.type
        if ty is None and isinstance(b.bound, App) and b.bound.head in ("Finset.range", "range"):
            ty = Ident("ℕ")
        inner = dict(env)
        for n in b.names:
            inner[n] = ty
        return infer(e.body, inner)
    return None


def arithmetic_ok(e: Expr, env: TypeEnv) -> bool:
    t = infer(e, env)
    return t == LIT or t in COMMUTATIVE
