"""Recursive-descent / Pratt parser for single theorem declarations."""

from __future__ import annotations

import re

from .errors import ParseError
from .lexer import EOF, IDENT, KEYWORDS, NUM, SYM, Token, _skip_block_comment, normalize_source, tokenize
from .nodes import (
    BRACKETS, AnonCtor, App, BigOp, Binder, Enclosed, Expr, Hypothesis, Ident,
    Interval, Lambda, ModEq, NumLit, Postfix, Proj, QBinder, Quantifier,
    Relation, SetBuilder, SetLit, Statement, Tuple, Typed, UnaryOp, BinaryOp,
)
from .prec import BINARY, BINDER_FORMS, MODEQ_PREC, POSTFIX, PREFIX, REL_PREC, RELATIONS, RIGHT

DECL_KEYWORDS = ("theorem", "lemma")
HEADER_KEYWORDS = frozenset({
    "import", "open", "set_option", "namespace", "section", "end", "universe",
    "variable", "attribute", "local", "scoped",
})
DEF_KEYWORDS = frozenset({
    "def", "noncomputable", "abbrev", "instance", "structure", "inductive",
    "axiom", "class", "opaque", "macro", "notation", "private", "protected",
})
# heads whose applications denote types rather than propositions
TYPE_HEADS = frozenset({
    "Set", "Finset", "Fin", "List", "Multiset", "Polynomial", "Matrix",
    "EuclideanSpace", "ZMod", "Option", "Array", "Vector", "Equiv.Perm",
    "MvPolynomial", "Submodule", "Subgroup", "Ideal", "Module", "Sym2",
    "PowerSeries", "Complex", "Real", "Nat", "Int", "Rat",
})
BINDER_PRED_RELS = frozenset({"∈", "∉", "⊆", "⊂", "<", "≤", ">", "≥", "≠"})
MODEQ_KINDS = frozenset({"MOD", "ZMOD", "PMOD"})
_WORD = re.compile(r"[^\s(\[{:]*")
_ARG_START_SYMS = frozenset({"(", "⟨", "{", "⌊", "⌈", "‖", "↑", "λ"})


def parse_statement(source: str, preamble: str = "reject") -> Statement:
    """Parse one ``theorem`` declaration.

    ``preamble`` controls leading ``def``-style blocks: ``"reject"`` raises
    :class:`ParseError`, ``"keep"`` stores them verbatim in the header.
    Whatever follows the top-level ``:=`` is discarded.
    """
    src = normalize_source(source)
    header, start = _split_header(src, preamble)
    return _Parser(src, start).statement(header)


def parse_expr(source: str) -> Expr:
    src = normalize_source(source)
    p = _Parser(src, 0, stop_at_assign=False)
    e = p.expr(0)
    p.expect_eof()
    return e


def _skip_trivia(src: str, pos: int) -> int:
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
        elif src.startswith("--", pos):
            j = src.find("\n", pos)
            pos = n if j < 0 else j + 1
        elif src.startswith("/-", pos):
            pos = _skip_block_comment(src, pos)
        else:
            break
    return pos


def _split_header(src: str, preamble: str) -> tuple[str, int]:
    """Locate the declaration; everything before it is the verbatim header."""
    pos = 0
    in_def = False
    n = len(src)
    while True:
        pos = _skip_trivia(src, pos)
        if pos >= n:
            raise ParseError.at(src, n, "theorem declaration", "end of input")
        word = _WORD.match(src, pos).group(0)
        if word in DECL_KEYWORDS:
            return src[:pos], pos
        if in_def or word in DEF_KEYWORDS:
            if preamble != "keep":
                raise ParseError.at(src, pos, "theorem declaration", word)
            in_def = True
        elif word not in HEADER_KEYWORDS:
            raise ParseError.at(src, pos, "theorem declaration", word)
        eol = src.find("\n", pos)
        pos = n if eol < 0 else eol + 1


class _Parser:
    def __init__(self, src: str, start: int, stop_at_assign: bool = True):
        self.src = src
        self.toks: list[Token] = list(tokenize(src, start, stop_at_assign))
        self.i = 0

    # -- token helpers -----------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == SYM and t.text == text

    def at_ident(self, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == IDENT and t.text not in KEYWORDS

    def error(self, expected: str) -> ParseError:
        t = self.peek()
        found = t.text if t.kind != EOF else "end of input"
        return ParseError.at(self.src, t.pos, expected, found)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"'{text}'")
        return self.next()

    def ident(self, what: str = "identifier") -> str:
        if not self.at_ident():
            raise self.error(what)
        return self.next().text

    def expect_eof(self) -> None:
        if self.peek().kind != EOF:
            raise self.error("end of input")

    # -- declarations ------------------------------------------------------

    def statement(self, header: str) -> Statement:
        kw = self.peek()
        if kw.kind != IDENT or kw.text not in DECL_KEYWORDS:
            raise self.error("'theorem'")
        self.next()
        name = self.ident("theorem name")
        binders: list[Binder] = []
        hyps: list[Hypothesis] = []
        kinds: dict[str, str] = {}
        while self.peek().kind == SYM and self.peek().text in BRACKETS:
            self._binder_group(binders, hyps, kinds)
        self.expect(":")
        goal = self.expr(0)
        if not self.at(":="):
            raise self.error("':='")
        self.next()
        labels = [h.label for h in hyps]
        if len(set(labels)) != len(labels):
            dup = next(x for x in labels if labels.count(x) > 1)
            raise ParseError.at(self.src, kw.pos, "unique hypothesis labels", dup)
        return Statement(name, tuple(binders), tuple(hyps), goal, header)

    def _binder_group(self, binders, hyps, kinds) -> None:
        open_tok = self.next()
        close = BRACKETS[open_tok.text]
        names: list[str] = []
        if open_tok.text == "[" and not (self.at_ident() and self.at(":", 1)):
            ty = self.expr(0)
        else:
            while self.at_ident():
                names.append(self.next().text)
            if not names:
                raise self.error("binder name")
            self.expect(":")
            ty = self.expr(0)
        self.expect(close)
        if open_tok.text == "(" and names and _is_prop(ty, kinds):
            for label in names:
                hyps.append(Hypothesis(label, ty))
            return
        kind = "prop" if isinstance(ty, Ident) and ty.name == "Prop" else "term"
        for nm in names:
            kinds[nm] = kind
        binders.append(Binder(tuple(names), ty, open_tok.text))

    # -- expressions -------------------------------------------------------

    def expr(self, min_level: int) -> Expr:
        left = self.prefix()
        while True:
            t = self.peek()
            if t.kind != SYM:
                break
            op = t.text
            if op in BINARY:
                p, assoc = BINARY[op]
                if p < min_level:
                    break
                self.next()
                rhs = self.expr(p if assoc == RIGHT else p + 1)
                left = BinaryOp(op, left, rhs)
            elif op in RELATIONS:
                if REL_PREC < min_level:
                    break
                self.next()
                left = Relation(op, left, self.expr(REL_PREC + 1))
            elif op == "≡":
                if MODEQ_PREC < min_level:
                    break
                self.next()
                rhs = self.expr(MODEQ_PREC + 1)
                self.expect("[")
                kind = self.ident("MOD, ZMOD or PMOD")
                if kind not in MODEQ_KINDS:
                    self.i -= 1
                    raise self.error("MOD, ZMOD or PMOD")
                modulus = self.expr(0)
                self.expect("]")
                left = ModEq(left, rhs, kind, modulus)
            else:
                break
        return left

    def prefix(self) -> Expr:
        t = self.peek()
        if t.kind == SYM:
            if t.text in ("¬", "-"):
                self.next()
                return UnaryOp(t.text, self.expr(PREFIX[t.text][0]))
            if t.text in ("↑", "√"):
                self.next()
                return UnaryOp(t.text, self.arg())
            if t.text in ("∀", "∃", "∃!"):
                self.next()
                binders = self._quant_binders()
                self.expect(",")
                return Quantifier(t.text, binders, self.expr(0))
            if t.text in ("∑", "∏", "∫"):
                self.next()
                binder = self._bigop_binder()
                self.expect(",")
                return BigOp(t.text, binder, self.expr(BINDER_FORMS[t.text][0]))
            if t.text == "λ":
                return self.lam()
        if t.kind == IDENT and t.text == "fun":
            return self.lam()
        return self.application()

    def application(self) -> Expr:
        if self.at_ident():
            head = self.next().text
            args: list[Expr] = []
            while self._starts_arg():
                if self.at("λ") or (self.peek().kind == IDENT and self.peek().text == "fun"):
                    args.append(self.lam())
                    break
                args.append(self.arg())
            if args:
                return App(head, tuple(args))
            return self._postfix(Ident(head))
        e = self.arg()
        if self._starts_arg():
            raise self.error("operator (application head must be an identifier)")
        return e

    def _starts_arg(self) -> bool:
        t = self.peek()
        if t.kind == NUM:
            return True
        if t.kind == IDENT:
            return t.text not in KEYWORDS or t.text == "fun"
        return t.kind == SYM and t.text in _ARG_START_SYMS

    def arg(self) -> Expr:
        t = self.peek()
        if t.kind == IDENT and t.text not in KEYWORDS:
            self.next()
            e: Expr = Ident(t.text)
        elif t.kind == NUM:
            self.next()
            e = NumLit(t.text)
        elif self.at("("):
            self.next()
            first = self.expr(0)
            if self.at(":"):
                self.next()
                e = Typed(first, self.expr(0))
            elif self.at(","):
                items = [first]
                while self.at(","):
                    self.next()
                    items.append(self.expr(0))
                e = Tuple(tuple(items))
            else:
                e = first
            self.expect(")")
        elif self.at("⟨"):
            self.next()
            e = AnonCtor(tuple(self._comma_list("⟩")))
        elif self.at("{"):
            e = self._braces()
        elif t.kind == SYM and t.text in ("|", "⌊", "⌈", "‖"):
            self.next()
            inner = self.expr(0)
            e = self._close_enclosed(t.text, inner)
        elif self.at("↑"):
            self.next()
            return UnaryOp("↑", self.arg())
        elif self.at("λ") or (t.kind == IDENT and t.text == "fun"):
            return self.lam()
        else:
            raise self.error("expression")
        return self._postfix(e)

    def _close_enclosed(self, opener: str, inner: Expr) -> Expr:
        closers = {"|": ("|",), "⌊": ("⌋", "⌋₊"), "⌈": ("⌉", "⌉₊"), "‖": ("‖",)}[opener]
        t = self.peek()
        if t.kind == SYM and t.text in closers:
            self.next()
            kind = opener + ("₊" if t.text.endswith("₊") else "")
            return Enclosed(kind, inner)
        raise self.error(f"'{closers[0]}'")

    def _postfix(self, e: Expr) -> Expr:
        while True:
            t = self.peek()
            if t.kind == SYM and t.text in POSTFIX:
                self.next()
                e = Postfix(t.text, e)
            elif self.at(".") and not t.spaced and self.at_ident(1) and not self.peek(1).spaced:
                self.next()
                e = Proj(e, self.next().text)
            else:
                return e

    def _comma_list(self, close: str) -> list[Expr]:
        items: list[Expr] = []
        if not self.at(close):
            items.append(self.expr(0))
            while self.at(","):
                self.next()
                items.append(self.expr(0))
        self.expect(close)
        return items

    def _braces(self) -> Expr:
        self.expect("{")
        if self.at_ident() and self.peek(1).kind == SYM and self.peek(1).text in ("|", ":", "∈"):
            name = self.next().text
            ty = bound = rel = None
            if self.at(":"):
                self.next()
                ty = self.expr(0)
            elif self.at("∈"):
                self.next()
                rel = "∈"
                bound = self.expr(REL_PREC + 1)
            self.expect("|")
            body = self.expr(0)
            self.expect("}")
            return SetBuilder(QBinder((name,), ty, rel, bound), body)
        return SetLit(tuple(self._comma_list("}")))

    def lam(self) -> Expr:
        self.next()
        binders = self._plain_binders()
        self.expect("=>")
        return Lambda(binders, self.expr(0))

    # -- binders -----------------------------------------------------------

    def _grouped(self) -> QBinder:
        self.expect("(")
        names = self._names()
        self.expect(":")
        ty = self.expr(0)
        self.expect(")")
        return QBinder(names, ty, grouped=True)

    def _names(self) -> tuple[str, ...]:
        names = []
        while self.at_ident():
            names.append(self.next().text)
        if not names:
            raise self.error("bound variable")
        return tuple(names)

    def _plain_binders(self) -> tuple[QBinder, ...]:
        if self.at("("):
            out = []
            while self.at("("):
                out.append(self._grouped())
            return tuple(out)
        names = self._names()
        ty = None
        if self.at(":"):
            self.next()
            ty = self.expr(0)
        return (QBinder(names, ty),)

    def _quant_binders(self) -> tuple[QBinder, ...]:
        if self.at("("):
            return self._plain_binders()
        names = self._names()
        t = self.peek()
        if t.kind == SYM and t.text in BINDER_PRED_RELS:
            self.next()
            return (QBinder(names, None, t.text, self.expr(REL_PREC + 1)),)
        ty = None
        if self.at(":"):
            self.next()
            ty = self.expr(0)
        return (QBinder(names, ty),)

    def _bigop_binder(self) -> QBinder:
        if self.at("("):
            b = self._grouped()
            names, ty, grouped = b.names, b.type, True
        else:
            names, ty, grouped = self._names(), None, False
            if self.at(":"):
                self.next()
                ty = self.expr(REL_PREC + 1)
        rel = dom = None
        t = self.peek()
        if (t.kind == IDENT and t.text == "in") or self.at("∈"):
            self.next()
            rel = "in" if t.kind == IDENT else "∈"
            dom = self.expr(REL_PREC + 1)
            if self.at(".."):
                self.next()
                dom = Interval(dom, self.expr(REL_PREC + 1))
        return QBinder(names, ty, rel, dom, grouped)


def _root(name: str) -> str:
    return name.split(".", 1)[0]


def _mentions(e: Expr, kinds: dict[str, str]) -> bool:
    from .nodes import walk

    for _, node in walk(e):
        if isinstance(node, Ident) and kinds.get(_root(node.name)) in ("term", "prop"):
            return True
        if isinstance(node, App) and kinds.get(_root(node.head)) in ("term", "prop"):
            return True
    return False


def _is_prop(e: Expr, kinds: dict[str, str]) -> bool:
    """Syntactic guess whether a binder type is a proposition (a hypothesis)."""
    if isinstance(e, (Relation, ModEq)):
        return True
    if isinstance(e, BinaryOp):
        if e.op in ("∧", "∨", "↔", "∣"):
            return True
        if e.op == "→":
            return _is_prop(e.lhs, kinds) or _is_prop(e.rhs, kinds)
        return False
    if isinstance(e, UnaryOp):
        return e.op == "¬"
    if isinstance(e, Quantifier):
        return e.kind != "∀" or _is_prop(e.body, kinds)
    if isinstance(e, Ident):
        if e.name in ("True", "False"):
            return True
        if kinds.get(e.name) == "prop":
            return True
        return "." in e.name and kinds.get(_root(e.name)) == "term"
    if isinstance(e, App):
        if e.head in TYPE_HEADS:
            return False
        return _mentions(e, kinds)
    return False
