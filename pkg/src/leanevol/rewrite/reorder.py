"""Dependency-respecting hypothesis permutations."""

from __future__ import annotations

import itertools
import random
from dataclasses import replace

from ..syntax.analysis import free_vars
from ..syntax.nodes import Statement

_MAX_REJECTIONS = 1000


def dependencies(stmt: Statement) -> list[set[int]]:
    """deps[j] = indices of hypotheses whose labels hypothesis j mentions."""
    index = {h.label: i for i, h in enumerate(stmt.hypotheses)}
    out = []
    for j, h in enumerate(stmt.hypotheses):
        names = free_vars(h.prop, frozenset())
        out.append({index[n] for n in names if n in index and index[n] != j})
    return out


def is_legal(order: tuple[int, ...] | list[int], deps: list[set[int]]) -> bool:
    seen: set[int] = set()
    for i in order:
        if not deps[i] <= seen:
            return False
        seen.add(i)
    return True


def can_reorder(stmt: Statement) -> bool:
    """True when some non-identity legal order exists."""
    n = len(stmt.hypotheses)
    if n < 2:
        return False
    deps = dependencies(stmt)
    # a topological order is unique iff at every step exactly one node is ready
    placed: set[int] = set()
    while len(placed) < n:
        ready = [i for i in range(n) if i not in placed and deps[i] <= placed]
        if len(ready) > 1:
            return True
        placed.add(ready[0])
    return False


def legal_orders(stmt: Statement, limit: int = 40320) -> list[tuple[int, ...]]:
    deps = dependencies(stmt)
    out = []
    for perm in itertools.permutations(range(len(stmt.hypotheses))):
        if is_legal(perm, deps):
            out.append(perm)
            if len(out) >= limit:
                break
    return out


def _sample(deps: list[set[int]], rng: random.Random) -> list[int]:
    order = list(range(len(deps)))
    for _ in range(_MAX_REJECTIONS):
        rng.shuffle(order)
        if is_legal(order, deps):
            return order
    # heavily constrained: randomized Kahn order (not exactly uniform)
    placed: list[int] = []
    while len(placed) < len(deps):
        ready = [i for i in range(len(deps)) if i not in placed and deps[i] <= set(placed)]
        placed.append(rng.choice(ready))
    return placed


def permute(stmt: Statement, order) -> Statement:
    return replace(stmt, hypotheses=tuple(stmt.hypotheses[i] for i in order))


def sample_order(stmt: Statement, rng: random.Random) -> list[int]:
    n = len(stmt.hypotheses)
    if not can_reorder(stmt):
        return list(range(n))
    deps = dependencies(stmt)
    order = _sample(deps, rng)
    if order == list(range(n)):
        order = _sample(deps, rng)  # one re-draw to favour a visible change
    return order


def reorder_hypotheses(stmt: Statement, rng: random.Random) -> Statement:
    """Uniformly sampled legal permutation of the hypotheses (rejection sampling)."""
    return permute(stmt, sample_order(stmt, rng))
