"""Typed syntax tree for Lean 4 theorem statements.

Nodes are frozen dataclasses, so structural equality and hashing come for
free.  Parenthesization is not stored anywhere: the printer derives it
from the precedence table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

TRAILER = ":= by sorry"


@dataclass(frozen=True, slots=True)
class Ident:
    name: str


@dataclass(frozen=True, slots=True)
class NumLit:
    # literal text kept verbatim, e.g. "3555" or "0.5"
    text: str


@dataclass(frozen=True, slots=True)
class BinaryOp:
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class UnaryOp:
    """Prefix operator: ``¬``, ``-``, ``↑`` or ``√``."""

    op: str
    operand: Expr


@dataclass(frozen=True, slots=True)
class Postfix:
    """Postfix operator: factorial ``!``, inverse ``⁻¹`` or complement ``ᶜ``."""

    op: str
    operand: Expr


@dataclass(frozen=True, slots=True)
class Relation:
    rel: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class ModEq:
    """``a ≡ b [MOD n]`` and its ``ZMOD``/``PMOD`` siblings."""

    lhs: Expr
    rhs: Expr
    kind: str
    modulus: Expr


@dataclass(frozen=True, slots=True)
class QBinder:
    """Variables introduced by a quantifier, big operator, lambda or set-builder.

    ``bound_rel``/``bound`` hold binder predicates such as ``x ∈ S`` or
    ``x > 0``.  ``grouped`` records the ``(x : T)`` bracket form.
    """

    names: tuple[str, ...]
    type: Optional[Expr] = None
    bound_rel: Optional[str] = None
    bound: Optional[Expr] = None
    grouped: bool = False


@dataclass(frozen=True, slots=True)
class Quantifier:
    kind: str  # ∀, ∃, ∃!
    binders: tuple[QBinder, ...]
    body: Expr


@dataclass(frozen=True, slots=True)
class BigOp:
    kind: str  # ∑, ∏, ∫
    binder: QBinder
    body: Expr


@dataclass(frozen=True, slots=True)
class Lambda:
    binders: tuple[QBinder, ...]
    body: Expr


@dataclass(frozen=True, slots=True)
class App:
    head: str
    args: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Typed:
    expr: Expr
    type: Expr


@dataclass(frozen=True, slots=True)
class Tuple:
    items: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class AnonCtor:
    items: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Enclosed:
    """Delimited unary notation: ``|x|``, ``⌊x⌋``, ``⌈x⌉``, ``‖x‖``."""

    kind: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class SetBuilder:
    binder: QBinder
    body: Expr


@dataclass(frozen=True, slots=True)
class SetLit:
    items: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Proj:
    expr: Expr
    field: str


@dataclass(frozen=True, slots=True)
class Interval:
    """``lo..hi`` in an interval integral."""

    lo: Expr
    hi: Expr


Expr = Union[
    Ident, NumLit, BinaryOp, UnaryOp, Postfix, Relation, ModEq, Quantifier,
    BigOp, Lambda, App, Typed, Tuple, AnonCtor, Enclosed, SetBuilder, SetLit,
    Proj, Interval,
]

BRACKETS = {"(": ")", "{": "}", "[": "]", "⦃": "⦄"}


@dataclass(frozen=True, slots=True)
class Binder:
    names: tuple[str, ...]
    type: Expr
    bracket: str = "("

    @property
    def implicit(self) -> bool:
        return self.bracket in ("{", "⦃")


@dataclass(frozen=True, slots=True)
class Hypothesis:
    label: str
    prop: Expr


@dataclass(frozen=True, slots=True)
class Statement:
    name: str
    binders: tuple[Binder, ...]
    hypotheses: tuple[Hypothesis, ...]
    goal: Expr
    # verbatim text before the declaration (imports, opens, comments)
    header: str = ""
    trailer: str = field(default=TRAILER)

    def bound_names(self) -> list[str]:
        return [n for b in self.binders for n in b.names]


# ---------------------------------------------------------------------------
# generic child access


def _binder_kids(b: QBinder) -> list[Expr]:
    return [x for x in (b.type, b.bound) if x is not None]


def _rebuild_binder(b: QBinder, it: Iterator[Expr]) -> QBinder:
    t = next(it) if b.type is not None else None
    bound = next(it) if b.bound is not None else None
    return QBinder(b.names, t, b.bound_rel, bound, b.grouped)


def children(e: Expr) -> tuple[Expr, ...]:
    """Direct sub-expressions of ``e`` in a fixed order (paths index into this)."""
    if isinstance(e, (Ident, NumLit)):
        return ()
    if isinstance(e, (BinaryOp, Relation)):
        return (e.lhs, e.rhs)
    if isinstance(e, (UnaryOp, Postfix)):
        return (e.operand,)
    if isinstance(e, ModEq):
        return (e.lhs, e.rhs, e.modulus)
    if isinstance(e, (Quantifier, Lambda)):
        kids: list[Expr] = []
        for b in e.binders:
            kids.extend(_binder_kids(b))
        return (*kids, e.body)
    if isinstance(e, (BigOp, SetBuilder)):
        return (*_binder_kids(e.binder), e.body)
    if isinstance(e, App):
        return e.args
    if isinstance(e, Typed):
        return (e.expr, e.type)
    if isinstance(e, (Tuple, AnonCtor, SetLit)):
        return e.items
    if isinstance(e, (Enclosed, Proj)):
        return (e.expr,)
    if isinstance(e, Interval):
        return (e.lo, e.hi)
    raise TypeError(f"not an expression node: {e!r}")


def with_children(e: Expr, kids: tuple[Expr, ...] | list[Expr]) -> Expr:
    """Rebuild ``e`` with its children replaced (same order as :func:`children`)."""
    it = iter(kids)
    if isinstance(e, (Ident, NumLit)):
        return e
    if isinstance(e, BinaryOp):
        return BinaryOp(e.op, next(it), next(it))
    if isinstance(e, Relation):
        return Relation(e.rel, next(it), next(it))
    if isinstance(e, UnaryOp):
        return UnaryOp(e.op, next(it))
    if isinstance(e, Postfix):
        return Postfix(e.op, next(it))
    if isinstance(e, ModEq):
        return ModEq(next(it), next(it), e.kind, next(it))
    if isinstance(e, Quantifier):
        binders = tuple(_rebuild_binder(b, it) for b in e.binders)
        return Quantifier(e.kind, binders, next(it))
    if isinstance(e, Lambda):
        binders = tuple(_rebuild_binder(b, it) for b in e.binders)
        return Lambda(binders, next(it))
    if isinstance(e, BigOp):
        return BigOp(e.kind, _rebuild_binder(e.binder, it), next(it))
    if isinstance(e, SetBuilder):
        return SetBuilder(_rebuild_binder(e.binder, it), next(it))
    if isinstance(e, App):
        return App(e.head, tuple(kids))
    if isinstance(e, Typed):
        return Typed(next(it), next(it))
    if isinstance(e, Tuple):
        return Tuple(tuple(kids))
    if isinstance(e, AnonCtor):
        return AnonCtor(tuple(kids))
    if isinstance(e, SetLit):
        return SetLit(tuple(kids))
    if isinstance(e, Enclosed):
        return Enclosed(e.kind, next(it))
    if isinstance(e, Proj):
        return Proj(next(it), e.field)
    if isinstance(e, Interval):
        return Interval(next(it), next(it))
    raise TypeError(f"not an expression node: {e!r}")


def scoped_children(e: Expr) -> list[tuple[Expr, tuple[QBinder, ...]]]:
    """Children paired with the binders that are in scope for them.

    Only the binders newly introduced by ``e`` are listed; a binder's own
    type and bound see the binders before it, the body sees all of them.
    """
    if isinstance(e, (Quantifier, Lambda)):
        out = []
        for i, b in enumerate(e.binders):
            for k in _binder_kids(b):
                out.append((k, e.binders[:i]))
        out.append((e.body, e.binders))
        return out
    if isinstance(e, (BigOp, SetBuilder)):
        return [(k, ()) for k in _binder_kids(e.binder)] + [(e.body, (e.binder,))]
    return [(k, ()) for k in children(e)]


def subexpr(e: Expr, path: tuple[int, ...] | list[int]) -> Expr:
    for i in path:
        e = children(e)[i]
    return e


def replace_at(e: Expr, path: tuple[int, ...] | list[int], new: Expr) -> Expr:
    if not path:
        return new
    kids = list(children(e))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(e, kids)


def walk(e: Expr, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Expr]]:
    """Pre-order traversal yielding ``(path, node)``."""
    yield path, e
    for i, k in enumerate(children(e)):
        yield from walk(k, path + (i,))


def depth(e: Expr) -> int:
    kids = children(e)
    return 1 + max((depth(k) for k in kids), default=0)
