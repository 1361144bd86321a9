"""Polynomial expression grammar.

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | atom
    atom   := INT | INT '/' INT | IDENT | IDENT '^' INT | '(' expr ')'

Juxtaposition is rejected and ``^`` applies to a single identifier only.
Columns in errors are 1-based offsets into the expression text plus
``column_offset``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError, UnknownIdentifierError
from .graded_poly import GradedPolynomial, Universe

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def tokenize(text: str, column_offset: int = 0):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) + 1 + column_offset
        if m.group(1) is not None:
            toks.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("ident", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", column=start)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("end", "", len(text) + 1 + column_offset))
    return toks


class _Parser:
    def __init__(self, text: str, universe: Universe, column_offset: int):
        self.toks = tokenize(text, column_offset)
        self.i = 0
        self.u = universe

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of expression" if kind == "end" else repr(kind)
            got = "end of expression" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {want}, found {got}", column=tok[2])
        self.i += 1
        return tok

    def expr(self) -> GradedPolynomial:
        acc = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> GradedPolynomial:
        acc = self.unary()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.unary()
        nxt = self.peek()
        if nxt[0] in ("int", "ident", "("):
            raise ParseError("juxtaposition is not allowed; use '*'", column=nxt[2])
        return acc

    def unary(self) -> GradedPolynomial:
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        return self.atom()

    def atom(self) -> GradedPolynomial:
        kind, text, col = self.peek()
        if kind == "int":
            self.take()
            value = Fraction(int(text))
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")
                if int(den[1]) == 0:
                    raise ParseError("zero denominator", column=den[2])
                value = Fraction(int(text), int(den[1]))
            if self.peek()[0] == "^":
                raise ParseError("'^' applies only to a single variable", column=self.peek()[2])
            return self.u.const(value)
        if kind == "ident":
            self.take()
            if text not in self.u:
                raise UnknownIdentifierError(f"unknown identifier {text!r}", column=col)
            v = self.u.var(text)
            if self.peek()[0] == "^":
                self.take()
                e = self.take("int")
                return v ** int(e[1])
            return v
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            if self.peek()[0] == "^":
                raise ParseError("'^' applies only to a single variable", column=self.peek()[2])
            return inner
        what = "end of expression" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", column=col)


def parse_polynomial(text: str, universe: Universe, column_offset: int = 0) -> GradedPolynomial:
    p = _Parser(text, universe, column_offset)
    out = p.expr()
    p.take("end")
    return out
