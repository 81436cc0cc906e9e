"""Sparse polynomials over Q with a fixed list of variable names.

A monomial is a sorted tuple of (variable index, exponent) pairs.  Exponents
may be negative, which lets monomial denominators (as in the beta and alpha
formulas) stay inside the type; division is only defined by monomials.
"""

from __future__ import annotations

from fractions import Fraction

from ..kernel import parse
from ..kernel.expr import Add, Const, Expr, Mul, Pow, Sym


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for i, e in b:
        s = out.get(i, 0) + e
        if s:
            out[i] = s
        else:
            del out[i]
    return tuple(sorted(out.items()))


class Poly:
    __slots__ = ("names", "terms")

    def __init__(self, names, terms=None):
        self.names = names
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    # constructors --------------------------------------------------------------
    @classmethod
    def const(cls, names, c):
        return cls(names, {(): c})

    @classmethod
    def var(cls, names, i):
        """The variable with 0-based index i."""
        return cls(names, {((i, 1),): 1})

    @classmethod
    def from_expr(cls, names, e: Expr):
        index = {n: i for i, n in enumerate(names)}
        return _from_expr(cls, names, index, e)

    @classmethod
    def parse(cls, names, text):
        return cls.from_expr(names, parse(text))

    # queries -------------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = Poly.const(self.names, o)
        return isinstance(o, Poly) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def variables(self):
        return sorted({i for m in self.terms for i, _ in m})

    # arithmetic ----------------------------------------------------------------
    def _coerce(self, o):
        return o if isinstance(o, Poly) else Poly.const(self.names, o)

    def __add__(self, o):
        o = self._coerce(o)
        t = dict(self.terms)
        for m, c in o.terms.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return Poly(self.names, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.names, {m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return Poly(self.names, {m: c * o for m, c in self.terms.items()})
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return Poly(self.names, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return (1 / self) ** (-k)
        out = Poly.const(self.names, 1)
        for _ in range(k):
            out = out * self
        return out

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return self * (Fraction(1) / o)
        if len(o.terms) != 1:
            raise ZeroDivisionError("only division by a monomial is supported")
        (m, c), = o.terms.items()
        inv = tuple((i, -e) for i, e in m)
        return Poly(self.names, {_mono_mul(k, inv): v / c for k, v in self.terms.items()})

    def __rtruediv__(self, o):
        return self._coerce(o) / self

    def diff(self, i):
        """Partial derivative in the variable with 0-based index i."""
        t = {}
        for m, c in self.terms.items():
            for j, (v, e) in enumerate(m):
                if v == i:
                    rest = m[:j] + ((v, e - 1),) + m[j + 1:] if e != 1 else m[:j] + m[j + 1:]
                    t[rest] = t.get(rest, 0) + c * e
                    break
        return Poly(self.names, t)

    # printing ------------------------------------------------------------------
    def sorted_terms(self):
        """Terms in descending graded order (canonical)."""
        def key(m):
            dense = [0] * len(self.names)
            for i, e in m[0]:
                dense[i] = e
            return (-sum(dense), [-d for d in dense])
        return sorted(self.terms.items(), key=key)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(self.names[i] + (f"^{e}" if e != 1 else "") for i, e in m)
            if not mono:
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({str(self)!r})"


def _from_expr(cls, names, index, e):
    if isinstance(e, Const):
        return cls.const(names, e.value)
    if isinstance(e, Sym):
        try:
            return cls.var(names, index[e.name])
        except KeyError:
            raise ValueError(f"unknown variable {e.name!r}") from None
    if isinstance(e, Add):
        out = cls(names)
        for a in e.args:
            out = out + _from_expr(cls, names, index, a)
        return out
    if isinstance(e, Mul):
        out = cls.const(names, 1)
        for a in e.args:
            out = out * _from_expr(cls, names, index, a)
        return out
    if isinstance(e, Pow):
        k = e.exp
        if isinstance(k, Const) and k.value.denominator == 1 and k.value >= 0:
            return _from_expr(cls, names, index, e.base) ** int(k.value)
    raise ValueError(f"not a polynomial entry: {e}")


Z_VARS = tuple(f"z{k}" for k in range(1, 44))
L_VARS = tuple(f"l{k}" for k in range(1, 25))
G_VARS = tuple(f"g{k}" for k in range(1, 21))


def Poly43(text_or_expr):
    """A polynomial in z1..z43."""
    if isinstance(text_or_expr, str):
        return Poly.parse(Z_VARS, text_or_expr)
    return Poly.from_expr(Z_VARS, text_or_expr)
