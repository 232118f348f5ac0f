"""Lean 4 statement syntax: parsing, printing and structural analysis."""

from .analysis import DEFAULT_CONSTANTS, free_vars, loose_hash, normalize, structural_hash, unbound_identifiers
from .errors import ParseError
from .nodes import (
    AnonCtor, App, BigOp, BinaryOp, Binder, Enclosed, Expr, Hypothesis, Ident,
    Interval, Lambda, ModEq, NumLit, Postfix, Proj, QBinder, Quantifier,
    Relation, SetBuilder, SetLit, Statement, Tuple, Typed, UnaryOp, TRAILER,
)
from .parser import parse_expr, parse_statement
from .printer import print_expr, print_statement

__all__ = [
    "DEFAULT_CONSTANTS", "free_vars", "loose_hash", "normalize", "structural_hash", "unbound_identifiers",
    "ParseError",
    "AnonCtor", "App", "BigOp", "BinaryOp", "Binder", "Enclosed", "Expr", "Hypothesis", "Ident",
    "Interval", "Lambda", "ModEq", "NumLit", "Postfix", "Proj", "QBinder", "Quantifier",
    "Relation", "SetBuilder", "SetLit", "Statement", "Tuple", "Typed", "UnaryOp", "TRAILER",
    "parse_expr", "parse_statement", "print_expr", "print_statement",
]
