"""Recursive-descent parser for rational expressions.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | factor
    factor := base ('^' exponent)?
    base   := identifier | integer | '(' expr ')'
    exponent := ['-'] integer | '(' ['-'] integer ')'
"""
from __future__ import annotations

import re
from typing import Iterable

from ..errors import ParseError, PoleError
from .ratfun import RatFun

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.variables = variables
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos, self.text)

    def parse(self) -> RatFun:
        result = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos, self.text)
        return result

    def expr(self):
        acc = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by the zero polynomial", pos, self.text)
                acc = acc / rhs
        return acc

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.factor()

    def factor(self):
        base = self.base()
        if self.peek()[1] == "^":
            _, _, pos = self.take()
            k = self.exponent()
            if k < 0 and base.is_zero():
                raise ParseError("negative power of zero", pos, self.text)
            base = base ** k
        return base

    def exponent(self) -> int:
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, val, pos = self.take()
        if kind != "num":
            raise ParseError("exponent must be an integer", pos, self.text)
        if paren:
            self.expect(")")
        return sign * int(val)

    def base(self):
        kind, val, pos = self.take()
        if kind == "num":
            return RatFun.constant(self.variables, int(val))
        if kind == "name":
            if val not in self.variables:
                raise ParseError(f"unknown identifier {val!r}", pos, self.text)
            return RatFun.gen(self.variables, val)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse_expr(text: str, variables: Iterable[str]) -> RatFun:
    """Parse ``text`` into a normalized rational function in ``variables``."""
    try:
        return _Parser(text, tuple(variables)).parse()
    except PoleError as exc:
        raise ParseError(f"division by the zero polynomial ({exc})", None, text) from exc
