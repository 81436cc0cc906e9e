"""Truncated Taylor series in (x, y, p, q) around a point.

A Series holds the coefficients of all monomials of total degree <= order in
the four displacement variables.  Evaluating an expression tree on Series
inputs yields its full jet at the point without symbolic differentiation;
this is the second route used to cross-check symbolic derivative tables.
Coefficients are exact (flint fmpq) on rational paths, mpf otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial

import flint
import mpmath

from .evaluate import (DEFAULT_PRECISION, DivisionByZero, DomainViolation,
                       UnboundSymbol, fractional_power)
from .expr import Add, Const, Func, Mul, Pow, Sym, VARIABLES

MAX_ORDER = 3
NV = 4

MONOMIALS = sorted((m for m in product(range(MAX_ORDER + 1), repeat=NV) if sum(m) <= MAX_ORDER),
                   key=lambda m: (sum(m), tuple(-e for e in m)))
INDEX = {m: i for i, m in enumerate(MONOMIALS)}
DEGREE = [sum(m) for m in MONOMIALS]
# number of coefficients of degree <= n
SIZE = [sum(1 for d in DEGREE if d <= n) for n in range(MAX_ORDER + 1)]


def _mul_pairs(order):
    out = []
    for i, a in enumerate(MONOMIALS[:SIZE[order]]):
        for j, b in enumerate(MONOMIALS[:SIZE[order]]):
            m = tuple(x + y for x, y in zip(a, b))
            if sum(m) <= order:
                out.append((i, j, INDEX[m]))
    return out


MUL_PAIRS = [_mul_pairs(n) for n in range(MAX_ORDER + 1)]


def _diff_map(v, order):
    out = []
    for i, m in enumerate(MONOMIALS[:SIZE[order]]):
        if m[v]:
            lower = list(m)
            lower[v] -= 1
            out.append((i, INDEX[tuple(lower)], m[v]))
    return out


DIFF_MAPS = [[_diff_map(v, n) for n in range(MAX_ORDER + 1)] for v in range(NV)]


def _fq(v):
    """Fraction/int -> fmpq."""
    if isinstance(v, flint.fmpq):
        return v
    v = Fraction(v)
    return flint.fmpq(v.numerator, v.denominator)


def _mp(v):
    if isinstance(v, flint.fmpq):
        return mpmath.mpf(int(v.p)) / int(v.q)
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _public(v):
    if isinstance(v, flint.fmpq):
        return Fraction(int(v.p), int(v.q))
    return v


def _is_exact_scalar(v):
    return isinstance(v, (int, Fraction, flint.fmpq))


_Z = flint.fmpq(0)
_ONE = flint.fmpq(1)


class Series:
    """Coefficients are all fmpq (exact) or all mpf (inexact)."""

    __slots__ = ("c", "order", "exact")

    def __init__(self, c, order, exact=True):
        self.c = c
        self.order = order
        self.exact = exact

    @classmethod
    def const(cls, v, order=MAX_ORDER):
        if _is_exact_scalar(v):
            c = [_Z] * SIZE[order]
            c[0] = _fq(v)
            return cls(c, order, True)
        c = [mpmath.mpf(0)] * SIZE[order]
        c[0] = mpmath.mpf(v)
        return cls(c, order, False)

    @classmethod
    def variable(cls, k, v0, order=MAX_ORDER):
        s = cls.const(v0, order)
        if order >= 1:
            e = [0] * NV
            e[k] = 1
            s.c[INDEX[tuple(e)]] = _ONE if s.exact else mpmath.mpf(1)
        return s

    def inexact(self):
        if not self.exact:
            return self
        return Series([_mp(a) for a in self.c], self.order, False)

    @property
    def value(self):
        """Constant term as Fraction or mpf."""
        return _public(self.c[0])

    def coeff(self, m):
        return _public(self.c[INDEX[tuple(m)]])

    def partial(self, m):
        """Partial derivative with multi-index m at the expansion point."""
        k = 1
        for e in m:
            k *= factorial(e)
        return self.coeff(m) * k

    def truncate(self, order):
        if order >= self.order:
            return self
        return Series(self.c[:SIZE[order]], order, self.exact)

    # arithmetic -------------------------------------------------------------
    def _scalar(self, v):
        """Scalar in this series' representation (or None if it forces mpf)."""
        if self.exact:
            return _fq(v) if _is_exact_scalar(v) else None
        return _mp(v)

    def _pair(self, o):
        if not isinstance(o, Series):
            o = Series.const(o, self.order)
        a, b = self, o
        if a.exact != b.exact:
            a, b = a.inexact(), b.inexact()
        return a, b

    def __add__(self, o):
        a, b = self._pair(o)
        n = min(a.order, b.order)
        k = SIZE[n]
        return Series([x + y for x, y in zip(a.c[:k], b.c[:k])], n, a.exact)

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c], self.order, self.exact)

    def __sub__(self, o):
        a, b = self._pair(o)
        return a + (-b)

    def __rsub__(self, o):
        a, b = self._pair(o)
        return b + (-a)

    def scale(self, k):
        ks = self._scalar(k)
        if ks is None:
            return self.inexact().scale(k)
        return Series([a * ks for a in self.c], self.order, self.exact)

    def __mul__(self, o):
        if not isinstance(o, Series):
            return self.scale(o)
        a, b = self._pair(o)
        n = min(a.order, b.order)
        ac, bc = a.c, b.c
        out = [_Z if a.exact else mpmath.mpf(0)] * SIZE[n]
        for i, j, k in MUL_PAIRS[n]:
            ai = ac[i]
            if ai:
                bj = bc[j]
                if bj:
                    out[k] += ai * bj
        return Series(out, n, a.exact)

    __rmul__ = __mul__

    def _compose(self, coeffs):
        """sum_k coeffs[k] * tail^k where tail is self minus its value."""
        if not all(_is_exact_scalar(c) for c in coeffs):
            base = self.inexact()
        else:
            base = self
        t = list(base.c)
        t[0] = t[0] * 0
        u = Series(t, base.order, base.exact)
        out = Series.const(coeffs[0], base.order)
        if not base.exact:
            out = out.inexact()
        pw = None
        for k in range(1, base.order + 1):
            pw = u if pw is None else pw * u
            if coeffs[k]:
                out = out + pw.scale(coeffs[k])
        return out

    def reciprocal(self):
        c0 = _public(self.c[0])
        if c0 == 0:
            raise DivisionByZero("series with zero constant term inverted")
        inv = 1 / c0
        return self._compose([inv * (-inv) ** k for k in range(self.order + 1)])

    def __truediv__(self, o):
        if not isinstance(o, Series):
            o = Fraction(o) if isinstance(o, int) else o
            return self.scale(1 / o)
        return self * o.reciprocal()

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def power(self, r, prec=DEFAULT_PRECISION):
        """self ** r for a rational (or real) exponent r."""
        if isinstance(r, Fraction) and r.denominator == 1:
            n = int(r)
            if n >= 0:
                return self._int_power(n)
            return self.reciprocal()._int_power(-n)
        c0 = _public(self.c[0])
        if c0 <= 0:
            raise DomainViolation("non-positive base raised to a fractional power")
        head = fractional_power(c0, r, prec) if isinstance(r, Fraction) else mpmath.power(c0, r)
        coeffs = [head]
        binom = 1
        for k in range(1, self.order + 1):
            binom = binom * (r - (k - 1)) / k
            coeffs.append(head * binom / c0 ** k)
        return self._compose(coeffs)

    def _int_power(self, n):
        out = Series.const(1, self.order)
        if not self.exact:
            out = out.inexact()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def exp(self):
        c0 = _public(self.c[0])
        head = Fraction(1) if c0 == 0 else mpmath.exp(c0)
        return self._compose([head / factorial(k) for k in range(self.order + 1)])

    def log(self):
        c0 = _public(self.c[0])
        if c0 <= 0:
            raise DomainViolation("ln of a non-positive value")
        head = Fraction(0) if c0 == 1 else mpmath.log(c0)
        coeffs = [head] + [Fraction((-1) ** (k + 1), k) / c0 ** k for k in range(1, self.order + 1)]
        return self._compose(coeffs)

    def diff(self, v):
        """d/dv as a series of one lower order; v is an index 0..3 or a name."""
        if isinstance(v, str):
            v = VARIABLES.index(v)
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 series")
        n = self.order - 1
        out = [self.c[0] * 0] * SIZE[n]
        c = self.c
        for i, j, m in DIFF_MAPS[v][self.order]:
            if DEGREE[j] <= n and c[i]:
                out[j] += c[i] * m
        return Series(out, n, self.exact)

    def __repr__(self):
        return f"Series(order={self.order}, value={self.value})"


def jet_series(e, point, order=MAX_ORDER, prec=DEFAULT_PRECISION, bindings=None):
    """Series of expression e around point (x, y, p, q plus parameters).

    ``bindings`` maps symbol names to ready-made Series (used for composition).
    """
    base = {}
    for k, v in enumerate(VARIABLES):
        if bindings and v in bindings:
            base[v] = bindings[v]
        elif v in point:
            base[v] = Series.variable(k, _num(point[v]), order)
    for k, v in point.items():
        if k not in base:
            base[k] = _num(v)
    memo = {}
    with mpmath.workdps(prec + 10):
        return _lift_series(_ev(e, base, order, prec, memo), order)


def _num(v):
    if isinstance(v, (Fraction, mpmath.mpf)):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    return mpmath.mpf(v)


def _lift_series(v, order):
    return v if isinstance(v, Series) else Series.const(v, order)


def _ev(e, base, order, prec, memo):
    got = memo.get(e)
    if got is not None:
        return got
    r = _ev1(e, base, order, prec, memo)
    memo[e] = r
    return r


def _ev1(e, base, order, prec, memo):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Sym):
        try:
            return base[e.name]
        except KeyError:
            raise UnboundSymbol(f"symbol {e.name!r} is not bound") from None
    if isinstance(e, Add):
        acc = Fraction(0)
        for t in e.args:
            acc = acc + _ev(t, base, order, prec, memo)
        return acc
    if isinstance(e, Mul):
        acc = Fraction(1)
        for t in e.args:
            v = _ev(t, base, order, prec, memo)
            acc = v * acc if isinstance(v, Series) else acc * v
        return acc
    if isinstance(e, Pow):
        b = _ev(e.base, base, order, prec, memo)
        k = _ev(e.exp, base, order, prec, memo)
        if isinstance(k, Series):
            raise ValueError("exponent depends on a jet variable")
        if isinstance(b, Series):
            return b.power(k, prec)
        if isinstance(k, Fraction):
            return fractional_power(b, k, prec)
        if b <= 0:
            raise DomainViolation("non-positive base raised to an irrational power")
        return mpmath.power(b, k)
    if isinstance(e, Func):
        u = _ev(e.arg, base, order, prec, memo)
        if isinstance(u, Series):
            return u.exp() if e.name == "exp" else u.log()
        if e.name == "exp":
            return Fraction(1) if u == 0 else mpmath.exp(u)
        if u <= 0:
            raise DomainViolation("ln of a non-positive value")
        return Fraction(0) if u == 1 else mpmath.log(u)
    raise TypeError(f"cannot expand {e!r}")
