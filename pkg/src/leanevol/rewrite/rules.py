"""The seven equivalence rules and the rule registry.

A node-level rule is a function from a node (plus the carrier-type
environment in scope) to the list of rewritten nodes it can produce.  An
empty list means the rule is not applicable there.  Candidates identical to
the input are filtered out so a rule application always changes the tree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from ..syntax.nodes import BinaryOp, Expr, Relation, Statement, UnaryOp, scoped_children
from .types import TypeEnv, arithmetic_ok, extend


class RuleId(str, enum.Enum):
    HYPOTHESIS_REORDERING = "HypothesisReordering"
    COMMUTATIVITY = "Commutativity"
    ASSOCIATIVITY = "Associativity"
    DISTRIBUTIVITY = "Distributivity"
    DE_MORGAN = "DeMorgan"
    SYMMETRIC_OPERAND_SWAP = "SymmetricOperandSwap"
    DUAL_RELATION_CONVERSION = "DualRelationConversion"

    @classmethod
    def parse(cls, text: str) -> "RuleId":
        key = text.replace("_", "").replace("-", "").lower()
        for r in cls:
            if r.value.lower() == key or r.name.replace("_", "").lower() == key:
                return r
        raise ValueError(f"unknown rule {text!r}")


class Scope(str, enum.Enum):
    STATEMENT = "StatementLevel"
    NODE = "NodeLevel"


@dataclass(frozen=True)
class RuleApplication:
    rule_id: str
    node_path: tuple[int, ...]
    before: str
    after: str

    def to_dict(self) -> dict:
        return {"rule_id": self.rule_id, "node_path": list(self.node_path),
                "before": self.before, "after": self.after}

    @classmethod
    def from_dict(cls, d: dict) -> "RuleApplication":
        return cls(d["rule_id"], tuple(d["node_path"]), d["before"], d["after"])


Transform = Callable[[Expr, TypeEnv], list[Expr]]


@dataclass(frozen=True)
class RewriteRule:
    id: RuleId
    scope: Scope
    index: int  # position r1..r7
    description: str
    side_conditions: str
    transform: Optional[Transform] = field(default=None, compare=False, repr=False)

    def candidates(self, node: Expr, env: TypeEnv | None = None) -> list[Expr]:
        if self.transform is None:
            return []
        out = []
        for c in self.transform(node, env or {}):
            if c != node and c not in out:
                out.append(c)
        return out


# ---------------------------------------------------------------------------
# transforms

_ARITH = ("+", "*")
_LOGIC = ("∧", "∨")


def _op_ok(e: BinaryOp, env: TypeEnv) -> bool:
    if e.op in _LOGIC:
        return True
    return e.op in _ARITH and arithmetic_ok(e, env)


def _commute(e: Expr, env: TypeEnv) -> list[Expr]:
    if isinstance(e, BinaryOp) and e.op in _ARITH + _LOGIC and _op_ok(e, env):
        return [BinaryOp(e.op, e.rhs, e.lhs)]
    return []


def _associate(e: Expr, env: TypeEnv) -> list[Expr]:
    if not (isinstance(e, BinaryOp) and e.op in _ARITH + _LOGIC and _op_ok(e, env)):
        return []
    out = []
    a, b = e.lhs, e.rhs
    if isinstance(a, BinaryOp) and a.op == e.op:
        out.append(BinaryOp(e.op, a.lhs, BinaryOp(e.op, a.rhs, b)))
    if isinstance(b, BinaryOp) and b.op == e.op:
        out.append(BinaryOp(e.op, BinaryOp(e.op, a, b.lhs), b.rhs))
    return out


# (outer, inner): outer distributes over inner
_DIST_PAIRS = (("*", "+"), ("∧", "∨"), ("∨", "∧"))


def _distribute(e: Expr, env: TypeEnv) -> list[Expr]:
    if not isinstance(e, BinaryOp):
        return []
    out = []
    for outer, inner in _DIST_PAIRS:
        if outer == "*" and e.op in _ARITH and not arithmetic_ok(e, env):
            continue
        if e.op == outer:
            a, b = e.lhs, e.rhs
            if isinstance(b, BinaryOp) and b.op == inner:
                out.append(BinaryOp(inner, BinaryOp(outer, a, b.lhs), BinaryOp(outer, a, b.rhs)))
            if isinstance(a, BinaryOp) and a.op == inner:
                out.append(BinaryOp(inner, BinaryOp(outer, a.lhs, b), BinaryOp(outer, a.rhs, b)))
        if e.op == inner:
            a, b = e.lhs, e.rhs
            if isinstance(a, BinaryOp) and isinstance(b, BinaryOp) and a.op == b.op == outer:
                if a.lhs == b.lhs:
                    out.append(BinaryOp(outer, a.lhs, BinaryOp(inner, a.rhs, b.rhs)))
                if a.rhs == b.rhs:
                    out.append(BinaryOp(outer, BinaryOp(inner, a.lhs, b.lhs), a.rhs))
    return out


def _is_not(e: Expr) -> bool:
    return isinstance(e, UnaryOp) and e.op == "¬"


def _de_morgan(e: Expr, env: TypeEnv) -> list[Expr]:
    flip = {"∧": "∨", "∨": "∧"}
    if _is_not(e) and isinstance(e.operand, BinaryOp) and e.operand.op in flip:
        p = e.operand
        return [BinaryOp(flip[p.op], UnaryOp("¬", p.lhs), UnaryOp("¬", p.rhs))]
    if isinstance(e, BinaryOp) and e.op in flip and _is_not(e.lhs) and _is_not(e.rhs):
        return [UnaryOp("¬", BinaryOp(flip[e.op], e.lhs.operand, e.rhs.operand))]
    return []


def _swap(e: Expr, env: TypeEnv) -> list[Expr]:
    if isinstance(e, Relation) and e.rel in ("=", "≠"):
        return [Relation(e.rel, e.rhs, e.lhs)]
    return []


_DUAL = {"<": ">", ">": "<", "≤": "≥", "≥": "≤"}


def _dual(e: Expr, env: TypeEnv) -> list[Expr]:
    if isinstance(e, Relation) and e.rel in _DUAL:
        return [Relation(_DUAL[e.rel], e.rhs, e.lhs)]
    return []


# ---------------------------------------------------------------------------
# registry

_REGISTRY: dict[RuleId, RewriteRule] = {}


def register(rule: RewriteRule) -> RewriteRule:
    _REGISTRY[rule.id] = rule
    return rule


def get_rule(rule_id: Union[RuleId, str]) -> RewriteRule:
    if not isinstance(rule_id, RuleId):
        rule_id = RuleId.parse(rule_id)
    return _REGISTRY[rule_id]


def all_rules() -> list[RewriteRule]:
    return sorted(_REGISTRY.values(), key=lambda r: r.index)


def node_rules(ids=None) -> list[RewriteRule]:
    return [r for r in all_rules() if r.scope is Scope.NODE and (ids is None or r.id in ids)]


register(RewriteRule(
    RuleId.HYPOTHESIS_REORDERING, Scope.STATEMENT, 1,
    "Permute the labeled hypotheses of a statement.",
    "At least two hypotheses; a hypothesis never moves before another hypothesis whose label it mentions.",
))
register(RewriteRule(
    RuleId.COMMUTATIVITY, Scope.NODE, 2,
    "a ∘ b  ->  b ∘ a for ∘ in {+, *, ∧, ∨}.",
    "For + and *, both operands must have a known carrier among ℝ, ℤ, ℕ, ℚ (from binder annotations). ∧ and ∨ always.",
    _commute,
))
register(RewriteRule(
    RuleId.ASSOCIATIVITY, Scope.NODE, 3,
    "(a ∘ b) ∘ c  <->  a ∘ (b ∘ c) for ∘ in {+, *, ∧, ∨}.",
    "Same carrier condition as commutativity; needs a child with the same operator.",
    _associate,
))
register(RewriteRule(
    RuleId.DISTRIBUTIVITY, Scope.NODE, 4,
    "a * (b + c)  <->  a * b + a * c, and the same for ∧ over ∨ and ∨ over ∧; both sides, both directions.",
    "Arithmetic form needs a known commutative carrier; factoring needs a syntactically equal common operand.",
    _distribute,
))
register(RewriteRule(
    RuleId.DE_MORGAN, Scope.NODE, 5,
    "¬(P ∧ Q)  <->  ¬P ∨ ¬Q and ¬(P ∨ Q)  <->  ¬P ∧ ¬Q.",
    "Only where an explicit ¬ is present; never introduces double negation.",
    _de_morgan,
))
register(RewriteRule(
    RuleId.SYMMETRIC_OPERAND_SWAP, Scope.NODE, 6,
    "a = b  ->  b = a and a ≠ b  ->  b ≠ a.",
    "Relation is = or ≠.",
    _swap,
))
register(RewriteRule(
    RuleId.DUAL_RELATION_CONVERSION, Scope.NODE, 7,
    "a < b  <->  b > a and a ≤ b  <->  b ≥ a.",
    "Relation is one of <, >, ≤, ≥.",
    _dual,
))


def catalog() -> list[dict]:
    """Rule id, description and side conditions, for documentation."""
    return [
        {"id": r.id.value, "index": r.index, "scope": r.scope.value,
         "description": r.description, "side_conditions": r.side_conditions}
        for r in all_rules()
    ]


# ---------------------------------------------------------------------------
# public predicates


def applicable(rule: Union[RewriteRule, RuleId, str], node: Union[Expr, Statement],
               env: TypeEnv | None = None) -> bool:
    rule = rule if isinstance(rule, RewriteRule) else get_rule(rule)
    if isinstance(node, Statement):
        if rule.scope is Scope.STATEMENT:
            from .reorder import can_reorder
            return can_reorder(node)
        return False
    if rule.scope is Scope.STATEMENT:
        return False
    return bool(rule.candidates(node, env))


def apply(rule: Union[RewriteRule, RuleId, str], node: Expr, env: TypeEnv | None = None) -> Expr:
    """Rewrite ``node`` with the first candidate of ``rule``."""
    rule = rule if isinstance(rule, RewriteRule) else get_rule(rule)
    cands = rule.candidates(node, env)
    if not cands:
        raise ValueError(f"{rule.id.value} is not applicable here")
    return cands[0]


def sites(e: Expr, env: TypeEnv, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Expr, TypeEnv]]:
    """Pre-order (path, node, env-in-scope) triples."""
    yield path, e, env
    for i, (child, binders) in enumerate(scoped_children(e)):
        yield from sites(child, extend(env, binders), path + (i,))


def statement_env(stmt: Statement) -> TypeEnv:
    env: dict[str, Expr] = {}
    for b in stmt.binders:
        for n in b.names:
            env[n] = b.type
    return env
