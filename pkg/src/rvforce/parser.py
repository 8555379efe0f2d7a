"""Text syntax for formulas: a recursive-descent parser and a canonical printer.

Grammar (loosest binding first)::

    formula  := disj ("->" formula)?
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "!" unary | "(exists" var ")" unary | "(forall" var ")" unary
              | "(" formula ")" | atom
    atom     := term ("=" | "!=" | "<=" | "<") term
    term     := prod ("+" prod)*
    prod     := prim ("*" prim)*
    prim     := natural | ident | fname "(" term ("," term)* ")" | "(" term ")"

``a != b`` parses to ``!(a = b)`` and ``a < b`` to ``!(b <= a)``.
"""

from __future__ import annotations

import re
from typing import Iterable

from .errors import ArityError, ParseError, UnknownSymbolError
from .logic import (
    ALIASES,
    ATOMS,
    FUNCTIONS,
    QUANTIFIERS,
    And,
    App,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Le,
    Not,
    Num,
    Or,
    Term,
    Var,
    rename_apart,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|!=|<=|[()!&|=<+*,]))"
)
_COMPARISONS = {"=", "!=", "<=", "<"}
_QUANT_KEYWORDS = {"exists", "forall"}


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", *_linecol(text, bad))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
        if pos >= n:
            break
    toks.append(_Tok("eof", "", len(text)))
    return toks


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str, constants: Iterable[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.constants = set(constants)
        self.bound: list[str] = []
        self._match = self._matching_parens()

    def _matching_parens(self) -> dict[int, int]:
        out, stack = {}, []
        for i, t in enumerate(self.toks):
            if t.text == "(" and t.kind == "op":
                stack.append(i)
            elif t.text == ")" and t.kind == "op" and stack:
                out[stack.pop()] = i
        return out

    # -- token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None, cls=ParseError) -> ParseError:
        tok = tok or self.tok
        if tok.kind == "eof":
            return cls(f"syntax error at end of input: {msg}", *_linecol(self.text, tok.pos))
        return cls(f"syntax error at {tok.text!r}: {msg}", *_linecol(self.text, tok.pos))

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("op", "ident"):
            raise self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    # -- formulas
    def formula(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.at("|"):
            self.i += 1
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unary()
        while self.at("&"):
            self.i += 1
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if self.at("("):
            nxt = self.peek()
            if nxt.kind == "ident" and nxt.text in _QUANT_KEYWORDS:
                return self.quantifier()
            close = self._match.get(self.i)
            after = self.toks[close + 1] if close is not None else None
            if after is not None and after.kind == "op" and (after.text in _COMPARISONS or after.text in "+*"):
                return self.atom()
            self.i += 1
            body = self.formula()
            self.expect(")")
            return body
        return self.atom()

    def quantifier(self) -> Formula:
        self.expect("(")
        kw = self.tok.text
        self.i += 1
        if self.tok.kind != "ident" or self.tok.text in _QUANT_KEYWORDS:
            raise self.error("expected a variable name")
        var = self.tok.text
        self.i += 1
        self.expect(")")
        self.bound.append(var)
        try:
            body = self.unary()
        finally:
            self.bound.pop()
        return Exists(var, body) if kw == "exists" else Forall(var, body)

    def atom(self) -> Formula:
        left = self.term()
        op = self.tok
        if op.kind != "op" or op.text not in _COMPARISONS:
            raise self.error("expected a comparison (=, !=, <=, <)")
        self.i += 1
        right = self.term()
        if op.text == "=":
            return Eq(left, right)
        if op.text == "!=":
            return Not(Eq(left, right))
        if op.text == "<=":
            return Le(left, right)
        return Not(Le(right, left))

    # -- terms
    def term(self) -> Term:
        out = self.prod()
        while self.at("+"):
            self.i += 1
            out = App("add", (out, self.prod()))
        return out

    def prod(self) -> Term:
        out = self.prim()
        while self.at("*"):
            self.i += 1
            out = App("mul", (out, self.prim()))
        return out

    def prim(self) -> Term:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(int(t.text))
        if t.kind == "ident":
            if t.text in _QUANT_KEYWORDS:
                raise self.error("quantifier keyword inside a term")
            self.i += 1
            if self.at("("):
                name = ALIASES.get(t.text, t.text)
                if name not in FUNCTIONS:
                    raise self.error(f"unknown function symbol {t.text!r}", t, UnknownSymbolError)
                self.i += 1
                args = [self.term()]
                while self.at(","):
                    self.i += 1
                    args.append(self.term())
                self.expect(")")
                if len(args) != FUNCTIONS[name]:
                    raise self.error(
                        f"{name} expects {FUNCTIONS[name]} argument(s), got {len(args)}", t, ArityError
                    )
                return App(name, tuple(args))
            if t.text in FUNCTIONS or t.text in ALIASES:
                raise self.error(f"function symbol {t.text!r} used without arguments", t, ArityError)
            if t.text in self.bound or t.text not in self.constants:
                return Var(t.text)
            return Const(t.text)
        if self.at("("):
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        raise self.error("expected a term")


def parse_formula(text: str, constants: Iterable[str] = ()) -> Formula:
    """Parse ``text``; identifiers listed in ``constants`` become random-variable constants.

    Bound variables are renamed apart from each other, from free variables
    and from the declared constants.
    """
    constants = set(constants)
    p = _Parser(text, constants)
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return rename_apart(f, constants)


def parse_term(text: str, constants: Iterable[str] = ()) -> Term:
    p = _Parser(text, constants)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return t


# -- printing ------------------------------------------------------------------

_TERM_PREC = {"add": 1, "mul": 2}


def render_term(t: Term) -> str:
    if isinstance(t, Var) or isinstance(t, Const):
        return t.name
    if isinstance(t, Num):
        return str(t.value)
    if t.fn in _TERM_PREC:
        prec = _TERM_PREC[t.fn]
        left, right = t.args
        ls = render_term(left)
        rs = render_term(right)
        if _term_prec(left) < prec:
            ls = f"({ls})"
        if _term_prec(right) <= prec:
            rs = f"({rs})"
        return f"{ls} + {rs}" if t.fn == "add" else f"{ls}*{rs}"
    return f"{t.fn}({', '.join(render_term(a) for a in t.args)})"


def _term_prec(t: Term) -> int:
    if isinstance(t, App) and t.fn in _TERM_PREC:
        return _TERM_PREC[t.fn]
    return 3


_PREC = {Implies: 1, Or: 2, And: 3}
_SYM = {Implies: "->", Or: "|", And: "&"}


def _atomic(f: Formula) -> bool:
    return isinstance(f, ATOMS) or (isinstance(f, Not) and isinstance(f.body, Eq))


def _operand(f: Formula, parent: type, side: str) -> str:
    s = render_formula(f)
    if _atomic(f):
        return f"({s})"
    if type(f) in _PREC:
        p, q = _PREC[type(f)], _PREC[parent]
        right_assoc = parent is Implies
        if p < q or (p == q and (side == "left") == right_assoc):
            return f"({s})"
    return s


def _unary_operand(f: Formula) -> str:
    if isinstance(f, QUANTIFIERS) or (isinstance(f, Not) and not isinstance(f.body, Eq)):
        return render_formula(f)
    return f"({render_formula(f)})"


def render_formula(f: Formula) -> str:
    """Canonical text; ``parse_formula(render_formula(f))`` rebuilds ``f``."""
    if isinstance(f, Eq):
        return f"{render_term(f.left)} = {render_term(f.right)}"
    if isinstance(f, Le):
        return f"{render_term(f.left)} <= {render_term(f.right)}"
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return f"{render_term(f.body.left)} != {render_term(f.body.right)}"
        return "!" + _unary_operand(f.body)
    if type(f) in _PREC:
        op = _SYM[type(f)]
        return f"{_operand(f.left, type(f), 'left')} {op} {_operand(f.right, type(f), 'right')}"
    kw = "exists" if isinstance(f, Exists) else "forall"
    body = render_formula(f.body) if isinstance(f.body, QUANTIFIERS) else f"({render_formula(f.body)})"
    return f"({kw} {f.var}){body}"
