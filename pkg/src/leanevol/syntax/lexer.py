"""Tokenizer for the supported Lean 4 statement subset.

Identifier character classes follow Lean's own ``isLetterLike`` /
``isSubScriptAlnum`` rules, so ``h₀``, ``x'`` and ``ℝ`` lex as names while
``λ``, ``Π`` and ``Σ`` do not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import ParseError

IDENT = "ident"
NUM = "num"
SYM = "sym"
EOF = "eof"

KEYWORDS = frozenset({"theorem", "lemma", "fun", "λ", "in", "by"})

# longest first; value is the canonical spelling
_SYMBOLS = {
    "<->": "↔", ":=": ":=", "->": "→", "=>": "=>", "↦": "=>", ">=": "≥",
    "<=": "≤", "!=": "≠", "/\\": "∧", "\\/": "∨", "..": "..", "⁻¹": "⁻¹",
    "∃!": "∃!", "−": "-", "⬝": "•", "⋅": "•", "⌋₊": "⌋₊", "⌉₊": "⌉₊",
}
_SINGLE = set("()[]{}⦃⦄⟨⟩,.:+-*/%^∧∨→↔¬=≠<≤>≥∈∉⊆⊂∣|≡↑√!ᶜ⌊⌋⌈⌉‖∀∃∘•∪∩\\×∑∏∫")
# symbols that behave like identifiers
_ATOM_SYMBOLS = {"∞", "∅"}


def is_letter_like(c: str) -> bool:
    o = ord(c)
    return (
        (0x3B1 <= o <= 0x3C9 and o != 0x3BB)
        or (0x391 <= o <= 0x3A9 and o not in (0x3A0, 0x3A3))
        or 0x3CA <= o <= 0x3FB
        or 0x1F00 <= o <= 0x1FFE
        or 0x2100 <= o <= 0x214F
        or 0x1D49C <= o <= 0x1D59F
    )


def is_subscript(c: str) -> bool:
    o = ord(c)
    return 0x2080 <= o <= 0x2089 or 0x2090 <= o <= 0x209C or 0x1D62 <= o <= 0x1D6A


def is_id_first(c: str) -> bool:
    return ("a" <= c <= "z") or ("A" <= c <= "Z") or c == "_" or is_letter_like(c)


def is_id_rest(c: str) -> bool:
    return is_id_first(c) or ("0" <= c <= "9") or c in "'!?" or is_subscript(c)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    pos: int  # character offset into the source
    end: int
    # whitespace (or a comment) directly precedes this token
    spaced: bool = True


def normalize_source(text: str) -> str:
    """Undo typesetting artifacts that show up in extracted corpora."""
    return text.replace("|\\textasciicircum|", "^").replace("\\textasciicircum", "^")


def tokenize(src: str, start: int = 0, stop_at_assign: bool = True) -> Iterator[Token]:
    """Yield tokens from ``src[start:]``.

    With ``stop_at_assign`` the generator ends right after the first ``:=``
    outside brackets, so proof text after the signature is never lexed.
    """
    i = start
    n = len(src)
    depth = 0
    spaced = True
    while True:
        # whitespace and comments
        while i < n:
            c = src[i]
            if c.isspace():
                i += 1
                spaced = True
            elif src.startswith("--", i):
                j = src.find("\n", i)
                i = n if j < 0 else j + 1
                spaced = True
            elif src.startswith("/-", i):
                i = _skip_block_comment(src, i)
                spaced = True
            else:
                break
        if i >= n:
            yield Token(EOF, "", n, n, spaced)
            return
        c = src[i]
        if is_id_first(c):
            j = i + 1
            while j < n:
                if is_id_rest(src[j]):
                    j += 1
                elif src[j] == "." and j + 1 < n and (is_id_first(src[j + 1]) or src[j + 1].isdigit()):
                    j += 2
                else:
                    break
            if src[i:j] in ("Type", "Sort") and src.startswith("*", j):
                j += 1
            yield Token(IDENT, src[i:j], i, j, spaced)
            i = j
        elif "0" <= c <= "9":
            j = i
            while j < n and src[j].isdigit() and src[j].isascii():
                j += 1
            if j + 1 < n and src[j] == "." and src[j + 1].isdigit() and src[j + 1].isascii():
                j += 1
                while j < n and src[j].isdigit() and src[j].isascii():
                    j += 1
            yield Token(NUM, src[i:j], i, j, spaced)
            i = j
        elif c in _ATOM_SYMBOLS:
            yield Token(IDENT, c, i, i + 1, spaced)
            i += 1
        elif c == "λ":
            yield Token(SYM, "λ", i, i + 1, spaced)
            i += 1
        else:
            for k in (3, 2):
                chunk = src[i:i + k]
                if chunk in _SYMBOLS:
                    tok = Token(SYM, _SYMBOLS[chunk], i, i + k, spaced)
                    break
            else:
                if c in _SYMBOLS:
                    tok = Token(SYM, _SYMBOLS[c], i, i + 1, spaced)
                elif c in _SINGLE:
                    tok = Token(SYM, c, i, i + 1, spaced)
                else:
                    raise ParseError.at(src, i, "token", c)
            if tok.text in ("(", "[", "{", "⦃", "⟨"):
                depth += 1
            elif tok.text in (")", "]", "}", "⦄", "⟩"):
                depth -= 1
            yield tok
            i = tok.end
            if stop_at_assign and tok.text == ":=" and depth <= 0:
                yield Token(EOF, "", i, i, True)
                return
        spaced = False


def _skip_block_comment(src: str, i: int) -> int:
    level = 0
    n = len(src)
    while i < n:
        if src.startswith("/-", i):
            level += 1
            i += 2
        elif src.startswith("-/", i):
            level -= 1
            i += 2
            if level == 0:
                return i
        else:
            i += 1
    raise ParseError.at(src, n, "end of block comment", "end of input")
