"""EvolAST: probabilistic traversal applying equivalence rules to a statement."""

from __future__ import annotations

import enum
import hashlib
import random
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Optional

from .rewrite.reorder import can_reorder, legal_orders, permute, sample_order
from .rewrite.rules import RuleApplication, RuleId, get_rule, node_rules, sites, statement_env
from .rewrite.types import TypeEnv, extend
from .syntax.analysis import structural_hash
from .syntax.nodes import Expr, Hypothesis, Statement, replace_at, scoped_children, with_children
from .syntax.printer import print_expr, print_statement

MAX_CLOSURE_DEPTH = 12
DEFAULT_CLOSURE_LIMIT = 200_000


class Method(str, enum.Enum):
    AST = "AST"
    DOMAIN = "Domain"
    DIFFICULTY = "Difficulty"


class Status(str, enum.Enum):
    PENDING = "Pending"
    VERIFIED = "Verified"
    REJECTED = "Rejected"
    SKIPPED = "Skipped"


def _as_fraction(p) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        return Fraction(p).limit_denominator(10**9)
    return Fraction(p)


@dataclass(frozen=True)
class EngineConfig:
    p: Fraction = Fraction(1, 2)
    rng_seed: int = 0
    enabled_rules: frozenset = frozenset(RuleId)
    variants_per_statement: int = 3
    max_rule_applications: int = 8
    name_suffix: str = "_auged"

    def __post_init__(self):
        object.__setattr__(self, "p", _as_fraction(self.p))
        rules = frozenset(r if isinstance(r, RuleId) else RuleId.parse(r) for r in self.enabled_rules)
        object.__setattr__(self, "enabled_rules", rules)
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not rules:
            raise ValueError("enabled_rules must not be empty")
        if self.max_rule_applications < 1:
            raise ValueError("max_rule_applications must be >= 1")
        if self.variants_per_statement < 1:
            raise ValueError("variants_per_statement must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {
            "p": str(self.p),
            "rng_seed": self.rng_seed,
            "enabled_rules": sorted(r.value for r in self.enabled_rules),
            "variants_per_statement": self.variants_per_statement,
            "max_rule_applications": self.max_rule_applications,
            "name_suffix": self.name_suffix,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        kw = dict(d)
        if "enabled_rules" in kw:
            kw["enabled_rules"] = frozenset(kw["enabled_rules"])
        if "p" in kw:
            kw["p"] = Fraction(str(kw["p"]))
        return cls(**kw)


@dataclass
class EvolutionRecord:
    seed_statement_id: str
    method: Method
    output: str
    rng_seed: Optional[int] = None
    applications: list[RuleApplication] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    status: Status = Status.PENDING

    def to_dict(self) -> dict:
        return {
            "seed_statement_id": self.seed_statement_id,
            "method": self.method.value,
            "rng_seed": self.rng_seed,
            "applications": [a.to_dict() for a in self.applications],
            "metadata": self.metadata,
            "output": self.output,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvolutionRecord":
        return cls(
            seed_statement_id=d["seed_statement_id"],
            method=Method(d["method"]),
            output=d["output"],
            rng_seed=d.get("rng_seed"),
            applications=[RuleApplication.from_dict(a) for a in d.get("applications", [])],
            metadata=d.get("metadata", {}),
            status=Status(d.get("status", "Pending")),
        )


def variant_seed(rng_seed: int, k: int) -> int:
    """Per-variant RNG seed, stable across Python versions and platforms."""
    digest = hashlib.sha256(f"{rng_seed}:{k}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# one variant


class _Walk:
    def __init__(self, cfg: EngineConfig, rng: random.Random):
        self.rng = rng
        self.p = cfg.p
        self.cap = cfg.max_rule_applications
        self.rules = node_rules(cfg.enabled_rules)
        self.count = 0
        self.apps: list[RuleApplication] = []

    def bernoulli(self) -> bool:
        return self.rng.random() < self.p

    def visit(self, e: Expr, env: TypeEnv, path: tuple[int, ...]) -> Expr:
        if self.count < self.cap:
            options = [(r, c) for r in self.rules if (c := r.candidates(e, env))]
            if options and self.bernoulli():
                rule, cands = self.rng.choice(options)
                new = self.rng.choice(cands)
                self.apps.append(RuleApplication(rule.id.value, path, print_expr(e), print_expr(new)))
                self.count += 1
                e = new
        kids = []
        changed = False
        for i, (child, binders) in enumerate(scoped_children(e)):
            out = self.visit(child, extend(env, binders), path + (i,))
            changed |= out is not child
            kids.append(out)
        return with_children(e, kids) if changed else e


def _evolve_once(stmt: Statement, cfg: EngineConfig, seed: int) -> tuple[Statement, list[RuleApplication]]:
    rng = random.Random(seed)
    walk = _Walk(cfg, rng)
    if RuleId.HYPOTHESIS_REORDERING in cfg.enabled_rules and can_reorder(stmt) and walk.bernoulli():
        order = sample_order(stmt, rng)
        if order != list(range(len(stmt.hypotheses))):
            before = " ".join(h.label for h in stmt.hypotheses)
            stmt = permute(stmt, order)
            walk.apps.append(RuleApplication(
                RuleId.HYPOTHESIS_REORDERING.value, (), before, " ".join(h.label for h in stmt.hypotheses)))
    env = statement_env(stmt)
    hyps = []
    for i, h in enumerate(stmt.hypotheses):
        hyps.append(Hypothesis(h.label, walk.visit(h.prop, env, (i,))))
    goal = walk.visit(stmt.goal, env, (len(hyps),))
    out = replace(stmt, name=stmt.name + cfg.name_suffix, hypotheses=tuple(hyps), goal=goal)
    return out, walk.apps


def replay(stmt: Statement, cfg: EngineConfig, seed: int) -> Statement:
    """Rebuild a variant from its recorded per-variant seed."""
    return _evolve_once(stmt, cfg, seed)[0]


def evolve_ast(stmt: Statement, cfg: EngineConfig, seed_id: str = "") -> list[EvolutionRecord]:
    """Up to ``cfg.variants_per_statement`` distinct equivalent variants of ``stmt``.

    Application paths start with the index of the rewritten prop: hypotheses
    in their (possibly reordered) order, then the goal.  A reordering is
    recorded with an empty path and label lists as before/after.
    """
    seen = {structural_hash(stmt)}
    records = []
    for k in range(cfg.variants_per_statement):
        seed = variant_seed(cfg.rng_seed, k)
        out, apps = _evolve_once(stmt, cfg, seed)
        h = structural_hash(out)
        if h in seen:
            continue
        seen.add(h)
        records.append(EvolutionRecord(
            seed_statement_id=seed_id or stmt.name,
            method=Method.AST,
            output=print_statement(out),
            rng_seed=seed,
            applications=apps,
            metadata={"variant_index": k, "engine": cfg.to_dict()},
        ))
    return records


# ---------------------------------------------------------------------------
# closure


@dataclass
class Closure:
    statements: dict[str, Statement]
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.statements)

    def __contains__(self, stmt: Statement) -> bool:
        return structural_hash(stmt) in self.statements

    def texts(self) -> set[str]:
        return {print_statement(s) for s in self.statements.values()}


def _props(stmt: Statement) -> list[Expr]:
    return [h.prop for h in stmt.hypotheses] + [stmt.goal]


def _with_prop(stmt: Statement, i: int, new: Expr) -> Statement:
    if i == len(stmt.hypotheses):
        return replace(stmt, goal=new)
    hyps = list(stmt.hypotheses)
    hyps[i] = Hypothesis(hyps[i].label, new)
    return replace(stmt, hypotheses=tuple(hyps))


def neighbours(stmt: Statement, rules) -> Iterable[Statement]:
    """Every statement one node-level rule application away."""
    env = statement_env(stmt)
    for i, prop in enumerate(_props(stmt)):
        for path, node, scope_env in sites(prop, env):
            for rule in rules:
                for cand in rule.candidates(node, scope_env):
                    yield _with_prop(stmt, i, replace_at(prop, path, cand))


def enumerate_closure(stmt: Statement, rules: Iterable, depth: int,
                      limit: int = DEFAULT_CLOSURE_LIMIT) -> Closure:
    """Statements reachable with at most ``depth`` node-level rewrites.

    Hypothesis reordering, when enabled, is closed over separately: every
    legal hypothesis order is combined with every node-level result, so a
    reordering does not consume depth.  This mirrors ``evolve_ast``, where
    the single statement-level permutation is not counted against the cap.
    Depth 0 is the input alone.
    """
    if depth < 0 or depth > MAX_CLOSURE_DEPTH:
        raise ValueError(f"depth must be in [0, {MAX_CLOSURE_DEPTH}]")
    ids = frozenset(r if isinstance(r, RuleId) else get_rule(r).id for r in rules)
    nrules = node_rules(ids)
    found: dict[str, Statement] = {structural_hash(stmt): stmt}
    truncated = False
    frontier = deque([stmt])
    for _ in range(depth):
        nxt = deque()
        for s in frontier:
            for t in neighbours(s, nrules):
                h = structural_hash(t)
                if h in found:
                    continue
                if len(found) >= limit:
                    truncated = True
                    break
                found[h] = t
                nxt.append(t)
            if truncated:
                break
        frontier = nxt
        if truncated or not frontier:
            break
    if depth > 0 and RuleId.HYPOTHESIS_REORDERING in ids and len(stmt.hypotheses) > 1:
        # legality depends only on labels, which node rules never touch
        orders = legal_orders(stmt)[1:]
        for s in list(found.values()):
            for order in orders:
                t = permute(s, order)
                h = structural_hash(t)
                if h in found:
                    continue
                if len(found) >= limit:
                    truncated = True
                    break
                found[h] = t
            if truncated:
                break
    return Closure(found, truncated)
