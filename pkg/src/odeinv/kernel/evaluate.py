"""Exact / high-precision evaluation of expression trees."""

from fractions import Fraction

import mpmath

from .expr import Add, Const, Func, Mul, Pow, Sym, iroot


class EvaluationError(ArithmeticError):
    pass


class DivisionByZero(EvaluationError, ZeroDivisionError):
    pass


class DomainViolation(EvaluationError):
    pass


class UnboundSymbol(EvaluationError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "unbound symbol"


DEFAULT_PRECISION = 50


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def as_value(v):
    """Normalise a user supplied coordinate to Fraction or mpf."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, mpmath.mpf):
        return v
    if isinstance(v, float):
        return mpmath.mpf(v)
    raise TypeError(f"unsupported value {v!r}")


def fractional_power(b, k: Fraction, prec=DEFAULT_PRECISION):
    """b**k for rational k; exact when the result is rational."""
    if k.denominator == 1:
        if b == 0 and k < 0:
            raise DivisionByZero("zero raised to a negative power")
        if isinstance(b, Fraction):
            return b ** int(k)
        with mpmath.workdps(prec + 10):
            return b ** int(k)
    if b < 0:
        raise DomainViolation("negative base raised to a fractional power")
    if b == 0:
        if k < 0:
            raise DivisionByZero("zero raised to a negative power")
        return Fraction(0)
    if isinstance(b, Fraction):
        d = k.denominator
        n, m = iroot(b.numerator, d), iroot(b.denominator, d)
        if n is not None and m is not None:
            return Fraction(n, m) ** k.numerator
    with mpmath.workdps(prec + 10):
        return mpmath.root(_to_mpf(b), k.denominator) ** k.numerator


def evaluate(e, a, prec=DEFAULT_PRECISION):
    """Value of ``e`` at the assignment ``a`` (name -> number).

    Returns a Fraction when everything stays rational, otherwise an mpmath
    float carrying ``prec`` significant digits (plus guard digits).
    """
    point = {k: as_value(v) for k, v in a.items()}
    memo = {}
    return _ev(e, point, prec, memo)


def _ev(e, point, prec, memo):
    got = memo.get(e)
    if got is not None:
        return got
    r = _ev1(e, point, prec, memo)
    memo[e] = r
    return r


def _ev1(e, point, prec, memo):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Sym):
        try:
            return point[e.name]
        except KeyError:
            raise UnboundSymbol(f"symbol {e.name!r} is not bound") from None
    if isinstance(e, Add):
        vals = [_ev(t, point, prec, memo) for t in e.args]
        if all(isinstance(v, Fraction) for v in vals):
            return sum(vals, Fraction(0))
        with mpmath.workdps(prec + 10):
            return mpmath.fsum(_to_mpf(v) for v in vals)
    if isinstance(e, Mul):
        vals = [_ev(t, point, prec, memo) for t in e.args]
        if all(isinstance(v, Fraction) for v in vals):
            out = Fraction(1)
            for v in vals:
                out *= v
            return out
        with mpmath.workdps(prec + 10):
            out = mpmath.mpf(1)
            for v in vals:
                out *= _to_mpf(v)
            return out
    if isinstance(e, Pow):
        b = _ev(e.base, point, prec, memo)
        k = _ev(e.exp, point, prec, memo)
        if isinstance(k, Fraction):
            return fractional_power(b, k, prec)
        if b <= 0:
            raise DomainViolation("non-positive base raised to an irrational power")
        with mpmath.workdps(prec + 10):
            return mpmath.power(_to_mpf(b), k)
    if isinstance(e, Func):
        u = _ev(e.arg, point, prec, memo)
        if e.name == "exp":
            if u == 0:
                return Fraction(1)
            with mpmath.workdps(prec + 10):
                return mpmath.exp(_to_mpf(u))
        if u <= 0:
            raise DomainViolation("ln of a non-positive value")
        if u == 1:
            return Fraction(0)
        with mpmath.workdps(prec + 10):
            return mpmath.log(_to_mpf(u))
    raise TypeError(f"cannot evaluate {e!r}")
