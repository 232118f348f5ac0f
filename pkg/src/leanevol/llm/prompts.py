"""Prompt templates for domain/difficulty evolution, judging and repair.

Templates are plain-text package assets.  Slots look like ``{Formal
Statement}`` and are filled in a single regex pass, so substituted text is
never re-scanned and needs no escaping.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

TEMPLATE_FILES = {
    "domain": "evol_domain.txt",
    "difficulty_up": "evol_difficulty_up.txt",
    "difficulty_down": "evol_difficulty_down.txt",
    "consistency": "judge_consistency.txt",
    "correctness": "judge_correctness.txt",
    "difficulty_judge": "judge_difficulty.txt",
    "repair": "repair.txt",
    "classify": "classify_domain.txt",
}

SLOTS = (
    "Original Formal Statement", "Domain List", "strategy", "Specific Methods",
    "Natural Language Description", "Formal Statement", "original nl",
    "correct formal statement", "incorrect lean4 code", "errors",
)
_SLOT_RE = re.compile(r"\{(" + "|".join(re.escape(s) for s in SLOTS) + r")\}")

DEFAULT_DOMAINS = (
    "Algebra", "Number Theory", "Integral", "Precalculus", "Differentiation",
    "Multivariable Calculus", "Sequences Series", "Applied Mathematics",
    "Discrete Mathematics", "Geometry", "Calculus", "Other",
)


@lru_cache(maxsize=None)
def load_template(kind: str) -> str:
    name = TEMPLATE_FILES[kind]
    return resources.files(__package__).joinpath("templates", name).read_text(encoding="utf-8")


def template_digest(kind: str) -> str:
    return hashlib.sha256(load_template(kind).encode("utf-8")).hexdigest()[:16]


def fill(template: str, values: Mapping[str, str]) -> str:
    def sub(m: re.Match) -> str:
        key = m.group(1)
        return values[key] if key in values else m.group(0)

    return _SLOT_RE.sub(sub, template)


def slot_spans(template: str) -> list[tuple[int, int, str]]:
    return [(m.start(), m.end(), m.group(1)) for m in _SLOT_RE.finditer(template)]


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class DomainList:
    names: tuple[str, ...] = DEFAULT_DOMAINS

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise ValueError("domain list must not be empty")
        if len(set(self.names)) != len(self.names):
            raise ValueError("domain names must be unique")

    def __contains__(self, name: str) -> bool:
        return self.lookup(name) is not None

    def __iter__(self):
        return iter(self.names)

    def lookup(self, name: str) -> str | None:
        key = " ".join(name.split()).casefold()
        for n in self.names:
            if n.casefold() == key:
                return n
        return None

    def render(self) -> str:
        return "[" + ", ".join(f'"{n}"' for n in self.names) + "]"


def render_domain_prompt(stmt: str, domains: DomainList | Sequence[str] = DomainList()) -> str:
    if not isinstance(domains, DomainList):
        domains = DomainList(tuple(domains))
    if not stmt.strip():
        raise ValueError("statement must not be empty")
    return fill(load_template("domain"), {
        "Original Formal Statement": stmt,
        "Domain List": domains.render(),
    })


# ---------------------------------------------------------------------------
# difficulty strategies


@dataclass(frozen=True)
class DifficultyStrategy:
    id: int
    direction: int
    title: str
    methods: tuple[str, ...]

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")
        if not 1 <= self.id <= 5:
            raise ValueError(f"strategy id must be in 1..5, got {self.id}")

    @property
    def label(self) -> str:
        return f"s{self.id}{'+' if self.direction > 0 else '-'}"


def _parse_strategy_file(text: str, direction: int) -> list[DifficultyStrategy]:
    out = []
    for block in re.split(r"\n\s*\n", text.strip()):
        lines = [l.strip() for l in block.splitlines() if l.strip()]
        head = re.match(r"(\d+)\.\s+(.*)", lines[0])
        out.append(DifficultyStrategy(int(head.group(1)), direction, head.group(2), tuple(lines[1:])))
    return out


@lru_cache(maxsize=None)
def strategies(direction: int) -> tuple[DifficultyStrategy, ...]:
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    name = "strategies_up.txt" if direction > 0 else "strategies_down.txt"
    text = resources.files(__package__).joinpath("templates", name).read_text(encoding="utf-8")
    return tuple(_parse_strategy_file(text, direction))


def get_strategy(sid: int, direction: int) -> DifficultyStrategy:
    return strategies(direction)[sid - 1]


def render_difficulty_prompt(stmt: str, strategy: DifficultyStrategy) -> str:
    kind = "difficulty_up" if strategy.direction > 0 else "difficulty_down"
    return fill(load_template(kind), {
        "Original Formal Statement": stmt,
        "strategy": strategy.title,
        "Specific Methods": "\n".join(strategy.methods),
    })


# ---------------------------------------------------------------------------
# verification prompts


def render_judge_prompt(aspect: str, nl: str, stmt: str) -> str:
    if aspect == "correctness":
        return fill(load_template("correctness"), {"original nl": nl, "correct formal statement": stmt})
    kind = {"consistency": "consistency", "difficulty": "difficulty_judge"}[aspect]
    return fill(load_template(kind), {"Natural Language Description": nl, "Formal Statement": stmt})


def render_repair_prompt(code: str, errors: str) -> str:
    return fill(load_template("repair"), {"incorrect lean4 code": code, "errors": errors})


def render_classify_prompt(nl: str, stmt: str, domains: DomainList = DomainList()) -> str:
    return fill(load_template("classify"), {
        "Domain List": domains.render(),
        "Natural Language Description": nl,
        "Formal Statement": stmt,
    })
