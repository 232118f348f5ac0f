"""Pretty printer emitting Unicode Lean 4 with minimal parentheses.

Each sub-expression is printed knowing the minimum level its position
requires (``need``) and the precedence of the operator that follows it in
the output (``follow``, -1 when nothing does).  The second matters for
prefix forms like ``¬``, ``-`` or ``∀`` whose operand would otherwise
swallow the following operator.
"""

from __future__ import annotations

from .nodes import (
    BRACKETS, AnonCtor, App, BigOp, BinaryOp, Binder, Enclosed, Expr,
    Hypothesis, Ident, Interval, Lambda, ModEq, NumLit, Postfix, Proj, QBinder,
    Quantifier, Relation, SetBuilder, SetLit, Statement, Tuple, Typed, UnaryOp,
)
from .prec import APP, BINDER_FORMS, ENCLOSERS, MAX, MODEQ_PREC, PREFIX, REL_PREC, TIGHT, binary_levels

_NONE = -1


def print_statement(stmt: Statement) -> str:
    parts = [f"theorem {stmt.name}"]
    parts.extend(print_binder(b) for b in stmt.binders)
    parts.extend(print_hypothesis(h) for h in stmt.hypotheses)
    return f"{stmt.header}{' '.join(parts)} : {print_expr(stmt.goal)} {stmt.trailer}"


def print_binder(b: Binder) -> str:
    close = BRACKETS[b.bracket]
    if not b.names:
        return f"{b.bracket}{print_expr(b.type)}{close}"
    return f"{b.bracket}{' '.join(b.names)} : {print_expr(b.type)}{close}"


def print_hypothesis(h: Hypothesis) -> str:
    return f"({h.label} : {print_expr(h.prop)})"


def print_expr(e: Expr) -> str:
    return _show(e, 0, _NONE)


def level(e: Expr) -> int:
    if isinstance(e, BinaryOp):
        return binary_levels(e.op)[0]
    if isinstance(e, (Relation, ModEq)):
        return REL_PREC
    if isinstance(e, UnaryOp):
        return PREFIX[e.op][1]
    if isinstance(e, (App, Postfix)):
        return APP
    if isinstance(e, Quantifier):
        return BINDER_FORMS[e.kind][1]
    if isinstance(e, Lambda):
        return BINDER_FORMS["fun"][1]
    if isinstance(e, BigOp):
        return BINDER_FORMS[e.kind][1]
    return MAX


def _open_edge(e: Expr) -> int | None:
    """Level at which a prefix form keeps parsing to its right, if any."""
    if isinstance(e, UnaryOp) and PREFIX[e.op][0] < MAX:
        return PREFIX[e.op][0]
    if isinstance(e, Quantifier):
        return BINDER_FORMS[e.kind][0]
    if isinstance(e, Lambda):
        return BINDER_FORMS["fun"][0]
    if isinstance(e, BigOp):
        return BINDER_FORMS[e.kind][0]
    return None


def _show(e: Expr, need: int, follow: int) -> str:
    edge = _open_edge(e)
    if level(e) < need or (edge is not None and follow >= edge):
        return f"({_body(e, _NONE)})"
    return _body(e, follow)


def _body(e: Expr, follow: int) -> str:
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, NumLit):
        return e.text
    if isinstance(e, BinaryOp):
        p, lneed, rneed = binary_levels(e.op)
        lhs = _show(e.lhs, lneed, p)
        rhs = _show(e.rhs, rneed, follow)
        if e.op in TIGHT:
            return f"{lhs}{e.op}{rhs}"
        return f"{lhs} {e.op} {rhs}"
    if isinstance(e, Relation):
        return f"{_show(e.lhs, REL_PREC + 1, REL_PREC)} {e.rel} {_show(e.rhs, REL_PREC + 1, follow)}"
    if isinstance(e, ModEq):
        lhs = _show(e.lhs, MODEQ_PREC + 1, MODEQ_PREC)
        rhs = _show(e.rhs, MODEQ_PREC + 1, _NONE)
        return f"{lhs} ≡ {rhs} [{e.kind} {print_expr(e.modulus)}]"
    if isinstance(e, UnaryOp):
        operand = _show(e.operand, PREFIX[e.op][0], follow)
        if e.op == "-" and operand.startswith("-"):
            operand = f"({operand})"  # "--" would open a comment
        return f"{e.op}{operand}"
    if isinstance(e, Postfix):
        operand = _show(e.operand, MAX, _NONE)
        sep = " " if e.op == "!" and not operand.endswith(")") else ""
        return f"{operand}{sep}{e.op}"
    if isinstance(e, App):
        args = " ".join(_show(a, MAX, _NONE) for a in e.args)
        return f"{e.head} {args}"
    if isinstance(e, Quantifier):
        binders = " ".join(_qbinder(b) for b in e.binders)
        return f"{e.kind} {binders}, {_show(e.body, 0, follow)}"
    if isinstance(e, Lambda):
        binders = " ".join(_qbinder(b) for b in e.binders)
        return f"fun {binders} => {_show(e.body, 0, follow)}"
    if isinstance(e, BigOp):
        body_level = BINDER_FORMS[e.kind][0]
        return f"{e.kind} {_qbinder(e.binder)}, {_show(e.body, body_level, follow)}"
    if isinstance(e, Typed):
        return f"({print_expr(e.expr)} : {print_expr(e.type)})"
    if isinstance(e, Tuple):
        return "(" + ", ".join(print_expr(x) for x in e.items) + ")"
    if isinstance(e, AnonCtor):
        return "⟨" + ", ".join(print_expr(x) for x in e.items) + "⟩"
    if isinstance(e, SetLit):
        return "{" + ", ".join(print_expr(x) for x in e.items) + "}"
    if isinstance(e, SetBuilder):
        return "{" + _qbinder(e.binder) + " | " + print_expr(e.body) + "}"
    if isinstance(e, Enclosed):
        return f"{e.kind[0]}{print_expr(e.expr)}{ENCLOSERS[e.kind[0]]}{e.kind[1:]}"
    if isinstance(e, Proj):
        return f"({print_expr(e.expr)}).{e.field}"
    if isinstance(e, Interval):
        return _interval(e)
    raise TypeError(f"cannot print {e!r}")


def _interval(iv: Interval) -> str:
    # "0..1" would lex as a decimal, so numeric lower bounds get parentheses
    lo = f"({print_expr(iv.lo)})" if isinstance(iv.lo, NumLit) else _show(iv.lo, REL_PREC + 1, _NONE)
    return f"{lo}..{_show(iv.hi, REL_PREC + 1, _NONE)}"


def _qbinder(b: QBinder) -> str:
    names = " ".join(b.names)
    if b.grouped:
        out = f"({names} : {print_expr(b.type)})"
    else:
        out = names
        if b.type is not None:
            out += f" : {print_expr(b.type)}"
    if b.bound is not None:
        bound = _interval(b.bound) if isinstance(b.bound, Interval) else _show(b.bound, REL_PREC + 1, _NONE)
        out += f" {b.bound_rel} {bound}"
    return out
