"""Precedence-climbing parser for the expression grammar.

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom ("^" exponent)?          right associative
    atom    := integer | name | name "(" expr ")" | "(" expr ")"

Exponents must reduce to a rational constant, or to a parameter expression
such as ``(-1-alpha)`` when symbolic exponents are needed.
"""

import re
from fractions import Fraction

from .expr import (FUNCTIONS, VARIABLES, Const, Sym, add, func, mul, neg,
                   power)


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        num, name, op = m.groups()
        start = m.start(1) if num else m.start(2) if name else m.start(3)
        if num is not None:
            if not num.isdigit():
                raise ParseError(f"non-rational numeric literal {num!r}", start)
            toks.append(("num", int(num), start))
        elif name is not None:
            toks.append(("name", name, start))
        else:
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r}", start)
            toks.append((op, op, start))
        pos = m.end()
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else add(e, neg(rhs))
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                e = mul(e, rhs)
            else:
                if rhs == 0:
                    raise ParseError("division by literal zero", pos)
                e = mul(e, power(rhs, -1))
        return e

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return neg(self.unary())
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            pos = self.take()[2]
            ex = self.exponent()
            try:
                return power(base, ex)
            except ZeroDivisionError:
                raise ParseError("zero raised to a negative power", pos) from None
        return base

    def exponent(self):
        pos = self.peek()[2]
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.take()[0] == "-":
                sign = -sign
        kind = self.peek()[0]
        if kind == "num":
            ex = Const(self.take()[1])
        elif kind == "(":
            self.take()
            ex = self.expr()
            self.take(")")
        elif kind == "name":
            name = self.take()[1]
            if name in VARIABLES or name in FUNCTIONS:
                raise ParseError("exponent must be a rational literal or parameter expression", pos)
            ex = Sym(name)
        else:
            raise ParseError("expected exponent", pos)
        if self.peek()[0] == "^":
            self.take()
            ex = power(ex, self.exponent())
        if sign < 0:
            ex = neg(ex)
        if ex.free_variables() or _has_func(ex):
            raise ParseError("exponent must be a rational literal or parameter expression", pos)
        return ex

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(Fraction(val))
        if kind == "name":
            self.take()
            if self.peek()[0] == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function name {val!r}", pos)
                self.take()
                arg = self.expr()
                self.take(")")
                return func(val, arg)
            if val in FUNCTIONS:
                raise ParseError(f"function {val!r} needs an argument", pos)
            return Sym(val)
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", pos)


def _has_func(e):
    from .expr import Func
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Func):
            return True
        if not isinstance(n, (Const, Sym)):
            stack.extend(n.args)
    return False


def parse(text: str):
    if not isinstance(text, str):
        raise TypeError("parse expects a string")
    return _Parser(text).parse()
