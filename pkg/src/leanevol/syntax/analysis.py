"""Scope analysis, alpha-normalization and statement digests."""

from __future__ import annotations

import hashlib
from dataclasses import replace

from .nodes import (
    App, BinaryOp, Binder, Expr, Hypothesis, Ident, QBinder, Relation,
    Statement, children, scoped_children, with_children,
)
from .printer import print_expr, print_statement

DEFAULT_CONSTANTS = frozenset({
    "ℝ", "ℕ", "ℤ", "ℚ", "ℂ", "Prop", "Type", "Type*", "Sort*", "Real", "Nat",
    "Int", "Rat", "Complex", "True", "False", "π", "∞", "∅", "dist", "abs",
    "deriv", "max", "min", "id", "Set", "Finset", "Fin", "List", "Multiset",
    "Polynomial", "Matrix", "EuclideanSpace", "ZMod", "ContinuousOn",
    "Continuous", "Differentiable", "DifferentiableOn", "Odd", "Even",
    "IsLeast", "IsGreatest", "Prime", "Summable", "HasSum", "Tendsto",
    "exp", "log", "sqrt", "sin", "cos", "tan", "arctan", "logb", "choose",
    "gcd", "lcm", "fib", "floor", "ceil", "Icc", "Ico", "Ioc", "Ioo", "Ici",
    "Iic", "Ioi", "Iio", "range", "card", "Not",
})

STRUCTURAL_HASH_VERSION = "1"


def _root(name: str) -> str:
    return name.split(".", 1)[0]


def is_constant(name: str, constants: frozenset[str] = DEFAULT_CONSTANTS) -> bool:
    if name in constants:
        return True
    root = _root(name)
    if root in constants:
        return True
    # namespaced names such as Real.sqrt or Nat.gcd
    return "." in name and root[:1].isupper()


def free_vars(e: Expr, constants: frozenset[str] = DEFAULT_CONSTANTS) -> set[str]:
    """Identifiers not bound by an enclosing binder inside ``e``.

    Projections are reported by their root (``x.1`` -> ``x``); names from
    ``constants`` and capitalized namespaces are excluded.
    """
    out: set[str] = set()
    _free(e, frozenset(), constants, out)
    return out


def _free(e: Expr, bound: frozenset[str], constants, out: set[str]) -> None:
    names = []
    if isinstance(e, Ident):
        names.append(e.name)
    elif isinstance(e, App):
        names.append(e.head)
    for name in names:
        root = _root(name)
        if root not in bound and not is_constant(name, constants):
            out.add(root)
    for child, binders in scoped_children(e):
        inner = bound.union(n for b in binders for n in b.names)
        _free(child, inner, constants, out)


def unbound_identifiers(stmt: Statement, constants: frozenset[str] = DEFAULT_CONSTANTS) -> set[str]:
    """Names a statement uses without introducing them (scope check)."""
    seen: set[str] = set()
    missing: set[str] = set()
    for b in stmt.binders:
        missing |= free_vars(b.type, constants) - seen
        seen.update(b.names)
    for h in stmt.hypotheses:
        missing |= free_vars(h.prop, constants) - seen
        seen.add(h.label)
    missing |= free_vars(stmt.goal, constants) - seen
    return missing


# ---------------------------------------------------------------------------
# alpha-normalization


def _rename(e: Expr, env: dict[str, str], depth: int) -> Expr:
    if isinstance(e, Ident):
        return Ident(_rename_name(e.name, env))
    if isinstance(e, App):
        args = tuple(_rename(a, env, depth) for a in e.args)
        return App(_rename_name(e.head, env), args)
    scoped = scoped_children(e)
    if all(not binders for _, binders in scoped):
        return with_children(e, [_rename(k, env, depth) for k in children(e)])
    # binder-introducing node: rebuild binders with positional names
    return _rename_binding(e, env, depth)


def _rename_name(name: str, env: dict[str, str]) -> str:
    root, dot, rest = name.partition(".")
    if root in env:
        return env[root] + dot + rest
    return name


def _rename_binding(e: Expr, env: dict[str, str], depth: int) -> Expr:
    from .nodes import BigOp, Lambda, Quantifier, SetBuilder

    def fresh_binders(binders: tuple[QBinder, ...], env, depth):
        out = []
        for b in binders:
            ty = _rename(b.type, env, depth) if b.type is not None else None
            bound = _rename(b.bound, env, depth) if b.bound is not None else None
            new_names = []
            env = dict(env)
            for n in b.names:
                fresh = f"_b{depth}"
                depth += 1
                if n != "_":
                    env[n] = fresh
                new_names.append(fresh)
            out.append(QBinder(tuple(new_names), ty, b.bound_rel, bound, b.grouped))
        return tuple(out), env, depth

    if isinstance(e, (Quantifier, Lambda)):
        binders, inner, d = fresh_binders(e.binders, env, depth)
        body = _rename(e.body, inner, d)
        return Quantifier(e.kind, binders, body) if isinstance(e, Quantifier) else Lambda(binders, body)
    if isinstance(e, (BigOp, SetBuilder)):
        (binder,), inner, d = fresh_binders((e.binder,), env, depth)
        body = _rename(e.body, inner, d)
        return BigOp(e.kind, binder, body) if isinstance(e, BigOp) else SetBuilder(binder, body)
    raise TypeError(f"unexpected binding node {e!r}")


def normalize(stmt: Statement) -> Statement:
    """Alpha-normal form: theorem name, header and all local names replaced
    by positional names; binder groups split into single binders."""
    env: dict[str, str] = {}
    binders = []
    k = 0
    for b in stmt.binders:
        ty = _rename(b.type, env, 0)
        if not b.names:
            binders.append(Binder((), ty, b.bracket))
            continue
        for n in b.names:
            k += 1
            env[n] = f"_v{k}"
            binders.append(Binder((f"_v{k}",), ty, b.bracket))
    labels = {h.label: f"_h{i + 1}" for i, h in enumerate(stmt.hypotheses)}
    full = {**env, **labels}
    hyps = tuple(Hypothesis(labels[h.label], _rename(h.prop, full, 0)) for h in stmt.hypotheses)
    goal = _rename(stmt.goal, full, 0)
    return Statement("_", tuple(binders), hyps, goal, header="")


def normalized_text(stmt: Statement) -> str:
    return print_statement(normalize(stmt))


def structural_hash(stmt: Statement) -> str:
    """Stable digest equal exactly for alpha-equivalent statements."""
    payload = f"v{STRUCTURAL_HASH_VERSION}\n{normalized_text(stmt)}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def text_hash(source: str) -> str:
    """Fallback digest for statements that do not parse: whitespace-normalized text."""
    payload = "text\n" + " ".join(source.split())
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# near-duplicate key

_AC_OPS = frozenset({"+", "*", "∧", "∨"})
_FLIP = {">": "<", "≥": "≤"}


def _flatten(e: Expr, op: str) -> list[Expr]:
    if isinstance(e, BinaryOp) and e.op == op:
        return _flatten(e.lhs, op) + _flatten(e.rhs, op)
    return [e]


def canonical_ac(e: Expr) -> Expr:
    """Sort commutative operands and orient relations (for advisory matching)."""
    e = with_children(e, [canonical_ac(k) for k in children(e)])
    if isinstance(e, BinaryOp) and e.op in _AC_OPS:
        parts = sorted(_flatten(e, e.op), key=print_expr)
        out = parts[0]
        for p in parts[1:]:
            out = BinaryOp(e.op, out, p)
        return out
    if isinstance(e, Relation):
        if e.rel in _FLIP:
            return Relation(_FLIP[e.rel], e.rhs, e.lhs)
        if e.rel in ("=", "≠"):
            a, b = sorted((e.lhs, e.rhs), key=print_expr)
            return Relation(e.rel, a, b)
    return e


def loose_hash(stmt: Statement) -> str:
    """Digest insensitive to commutativity, relation orientation and hypothesis order."""
    norm = normalize(stmt)
    binders = " ".join(
        f"{b.bracket}{' '.join(b.names)}:{print_expr(b.type)}" for b in norm.binders
    )
    props = sorted(print_expr(canonical_ac(h.prop)) for h in norm.hypotheses)
    payload = "\n".join(["loose", binders, *props, "⊢ " + print_expr(canonical_ac(norm.goal))])
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def rename_statement(stmt: Statement, name: str) -> Statement:
    return replace(stmt, name=name)
