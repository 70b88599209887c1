"""Tiny polynomial expression evaluator for catalog entries.

Grammar (deliberately minimal): +, -, *, ^ (nonnegative integer exponent),
parentheses, decimal/integer literals and parameter identifiers.  Evaluation
is exact when the environment supplies Fraction values, since literals are
parsed with Fraction and only ring operations are performed.
"""

from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*^]))")


class ExpressionError(ValueError):
    """Raised for syntax errors or references to undeclared parameters."""


def _tokenize(src: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionError(f"bad character in expression {src!r} at offset {pos}")
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif ident is not None:
            tokens.append(("ident", ident))
        else:
            tokens.append(("op", op))
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, src: str, env: dict):
        self.src = src
        self.env = env
        self.tokens = _tokenize(src)
        self.k = 0

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.k]

    def take(self) -> tuple[str, str]:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def parse(self):
        val = self.expr()
        if self.peek()[0] != "end":
            raise ExpressionError(f"trailing input in {self.src!r}")
        return val

    def expr(self):
        kind, text = self.peek()
        negate = False
        if kind == "op" and text in "+-":
            self.take()
            negate = text == "-"
        val = self.term()
        if negate:
            val = -val
        while True:
            kind, text = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                val = val + rhs if text == "+" else val - rhs
            else:
                return val

    def term(self):
        val = self.power()
        while True:
            kind, text = self.peek()
            if kind == "op" and text == "*":
                self.take()
                val = val * self.power()
            else:
                return val

    def power(self):
        base = self.atom()
        kind, text = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text = self.take()
            if kind != "num" or "." in text:
                raise ExpressionError(f"exponent must be a nonnegative integer in {self.src!r}")
            return base ** int(text)
        return base

    def atom(self):
        kind, text = self.take()
        if kind == "num":
            return Fraction(text)
        if kind == "ident":
            if text not in self.env:
                raise ExpressionError(f"unknown parameter {text!r} in {self.src!r}")
            return self.env[text]
        if kind == "op" and text == "(":
            val = self.expr()
            kind, text = self.take()
            if not (kind == "op" and text == ")"):
                raise ExpressionError(f"unbalanced parentheses in {self.src!r}")
            return val
        if kind == "op" and text == "-":
            return -self.atom()
        raise ExpressionError(f"unexpected token {text!r} in {self.src!r}")


def eval_expr(src: str, env: dict):
    """Evaluate an expression string against parameter values in ``env``."""
    return _Parser(src, env).parse()


def expr_identifiers(src: str) -> set[str]:
    """Parameter names referenced by an expression (syntax check included)."""
    names = {text for kind, text in _tokenize(src) if kind == "ident"}
    _Parser(src, {n: Fraction(0) for n in names}).parse()
    return names
