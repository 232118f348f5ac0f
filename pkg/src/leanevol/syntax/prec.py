"""Operator table shared by the parser and the printer (Lean 4 levels)."""

from __future__ import annotations

MAX = 1024  # atoms and anything allowed as an application argument
APP = 1000  # function application, prefix operators

LEFT, RIGHT, NONE = "left", "right", "none"

# op -> (precedence, associativity)
BINARY = {
    "↔": (20, NONE),
    "→": (25, RIGHT),
    "∨": (30, RIGHT),
    "∧": (35, RIGHT),
    "×": (35, RIGHT),
    "∣": (50, NONE),
    "+": (65, LEFT),
    "-": (65, LEFT),
    "∪": (65, LEFT),
    "*": (70, LEFT),
    "/": (70, LEFT),
    "%": (70, LEFT),
    "∩": (70, LEFT),
    "\\": (70, LEFT),
    "•": (73, RIGHT),
    "^": (75, RIGHT),
    "∘": (90, RIGHT),
}

RELATIONS = frozenset({"=", "≠", "<", "≤", ">", "≥", "∈", "∉", "⊆", "⊂"})
REL_PREC = 50
MODEQ_PREC = 50

# prefix op -> (operand level, result level)
PREFIX = {
    "¬": (40, APP),
    "-": (75, 75),
    "↑": (MAX, APP),
    "√": (MAX, APP),
}

POSTFIX = frozenset({"!", "⁻¹", "ᶜ"})

# binder notations: kind -> (body level, result level)
BINDER_FORMS = {
    "∀": (0, APP - 1),
    "∃": (0, APP - 1),
    "∃!": (0, APP - 1),
    "fun": (0, APP - 1),
    "∑": (67, 67),
    "∏": (67, 67),
    "∫": (60, 67),
}

# the ops the printer surrounds with spaces; ^ is printed tight (x^2)
TIGHT = frozenset({"^"})

ENCLOSERS = {"|": "|", "⌊": "⌋", "⌈": "⌉", "‖": "‖"}


def binary_levels(op: str) -> tuple[int, int, int]:
    """(node level, required lhs level, required rhs level)."""
    p, assoc = BINARY[op]
    if assoc == LEFT:
        return p, p, p + 1
    if assoc == RIGHT:
        return p, p + 1, p
    return p, p + 1, p + 1
