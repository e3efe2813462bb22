"""Text parser for the expression grammar.

Precedence (tightest first): ``^`` (right associative), unary ``-``,
``* /``, ``+ -``.  Exponents must be exact rationals and a signed exponent
must be parenthesized: ``x^-3`` is a syntax error, ``x^(-3)`` is not.
Implicit multiplication is rejected.  ``|x|`` is written ``abs(x)``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError, UnknownFunction
from .nodes import Const, Div, Expr, FN_NAMES, Fn, Mul, Neg, Param, Pow, Var, as_const, is_var_name
from .simplify import simplify

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad_at]!r}", bad_at)
        if m.group("num") is not None:
            tokens.append(_Token("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(_Token("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(_Token(m.group("op"), m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def parse(self) -> Expr:
        e = self.sum()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return e

    def sum(self) -> Expr:
        e = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.next()
            rhs = self.term()
            e = e + rhs if op.kind == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.next()
            rhs = self.unary()
            e = Mul(e, rhs) if op.kind == "*" else Div(e, rhs)
        return e

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.peek().kind == "^":
            caret = self.next()
            exponent = self.exponent()
            q = as_const(simplify(exponent))
            if q is None:
                raise ParseError("exponent must be an exact rational", caret.pos)
            return Pow(base, q)
        return base

    def exponent(self) -> Expr:
        tok = self.peek()
        if tok.kind == "-":
            raise ParseError("unary minus in exponent requires parentheses", tok.pos)
        base = self.primary()
        if self.peek().kind == "^":
            self.next()
            inner = self.exponent()
            q = as_const(simplify(inner))
            if q is None:
                raise ParseError("exponent must be an exact rational", tok.pos)
            return Pow(base, q)
        return base

    def primary(self) -> Expr:
        tok = self.next()
        if tok.kind == "num":
            return Const(Fraction(tok.text))
        if tok.kind == "(":
            e = self.sum()
            self.expect(")")
            return e
        if tok.kind == "ident":
            if self.peek().kind == "(":
                if tok.text not in FN_NAMES:
                    raise UnknownFunction(f"unknown function {tok.text!r}", tok.pos)
                self.next()
                arg = self.sum()
                self.expect(")")
                return Fn(tok.text, arg)
            if is_var_name(tok.text):
                return Var(tok.text)
            return Param(tok.text)
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}", tok.pos)


def parse_raw(text: str) -> Expr:
    """Grammar-faithful AST without simplification."""
    return _Parser(text).parse()


def parse(text: str) -> Expr:
    """Parse and canonicalize, so printing and reparsing is the identity."""
    return simplify(parse_raw(text))
