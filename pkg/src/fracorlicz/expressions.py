"""Tiny arithmetic grammar for coefficient expressions in config files.

Supported: numeric literals, the variable x, the binary operators + - * /,
unary minus, pow(expr, const), exp(expr), and bump(center, width) which is
the Gaussian exp(-((x - center)/width)^2).  Deliberately small: configs stay
reproducible without a scripting dependency.
"""

from __future__ import annotations

import re
from typing import Union

import numpy as np

__all__ = ["ExpressionError", "parse_expression", "evaluate_expression"]

_TOKEN_RE = re.compile(r"""
    (?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[()+\-*/,])
  | (?P<ws>\s+)
""", re.VERBOSE)


class ExpressionError(ValueError):
    """Parse or evaluation failure, carrying the 1-based column."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {text[pos]!r}", pos + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tk, tv, col = self.tokens[self.i]
        if (kind is not None and tk != kind) or (value is not None and tv != value):
            want = value or kind
            raise ExpressionError(f"expected {want!r}, found {tv or 'end of input'!r}", col)
        self.i += 1
        return tv, col

    def parse(self):
        node = self.expr()
        tk, tv, col = self.peek()
        if tk != "end":
            raise ExpressionError(f"trailing input {tv!r}", col)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op, _ = self.take("op")
            node = (("add" if op == "+" else "sub"), node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op, _ = self.take("op")
            node = (("mul" if op == "*" else "div"), node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take("op")
            return ("neg", self.unary())
        return self.atom()

    def signed_number(self) -> float:
        sign = 1.0
        if self.peek()[1] == "-":
            self.take("op")
            sign = -1.0
        value, _ = self.take("number")
        return sign * float(value)

    def atom(self):
        tk, tv, col = self.peek()
        if tk == "number":
            self.take()
            return ("num", float(tv))
        if tk == "name":
            self.take()
            if tv == "x":
                return ("x",)
            if tv == "exp":
                self.take("op", "(")
                inner = self.expr()
                self.take("op", ")")
                return ("exp", inner)
            if tv == "pow":
                self.take("op", "(")
                base = self.expr()
                self.take("op", ",")
                exponent = self.signed_number()
                self.take("op", ")")
                return ("pow", base, exponent)
            if tv == "bump":
                self.take("op", "(")
                center = self.signed_number()
                self.take("op", ",")
                width = self.signed_number()
                self.take("op", ")")
                return ("bump", center, width)
            raise ExpressionError(f"unknown name {tv!r} (allowed: x, exp, pow, bump)", col)
        if tv == "(":
            self.take("op", "(")
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise ExpressionError(f"expected a value, found {tv or 'end of input'!r}", col)


def parse_expression(text: str):
    if not text.strip():
        raise ExpressionError("empty expression", 1)
    return _Parser(text).parse()


def _eval(node, x):
    kind = node[0]
    if kind == "num":
        return np.full_like(x, node[1], dtype=float)
    if kind == "x":
        return np.array(x, dtype=float)
    if kind == "neg":
        return -_eval(node[1], x)
    if kind == "add":
        return _eval(node[1], x) + _eval(node[2], x)
    if kind == "sub":
        return _eval(node[1], x) - _eval(node[2], x)
    if kind == "mul":
        return _eval(node[1], x) * _eval(node[2], x)
    if kind == "div":
        return _eval(node[1], x) / _eval(node[2], x)
    if kind == "exp":
        return np.exp(_eval(node[1], x))
    if kind == "pow":
        return _eval(node[1], x) ** node[2]
    if kind == "bump":
        center, width = node[1], node[2]
        return np.exp(-(((np.asarray(x, float) - center) / width) ** 2))
    raise ExpressionError(f"unknown node kind {kind!r}", 1)


def evaluate_expression(expr: Union[str, tuple], x) -> np.ndarray:
    """Evaluate an expression (source text or parsed form) at abscissae x."""
    node = parse_expression(expr) if isinstance(expr, str) else expr
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _eval(node, x)
