"""Text form of expressions; ``parse(to_str(e)) is e`` for canonical trees."""

from fractions import Fraction

from .expr import Add, Const, Func, Mul, Pow, Sym, split_coeff

_ADD, _MUL, _POW, _ATOM = 1, 2, 3, 4


def to_str(e) -> str:
    return _fmt(e)


def _prec(e):
    if isinstance(e, Add):
        return _ADD
    if isinstance(e, Mul):
        return _MUL
    if isinstance(e, Pow):
        if _neg_const_exp(e):
            return _MUL
        return _POW
    if isinstance(e, Const):
        v = e.value
        if v < 0 or v.denominator != 1:
            return _MUL
    return _ATOM


def _neg_const_exp(e):
    return isinstance(e.exp, Const) and e.exp.value < 0


def _fmt(e) -> str:
    if isinstance(e, Const):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({_fmt(e.arg)})"
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.args):
            c, _ = split_coeff(t)
            if i == 0:
                parts.append(_fmt(t))
            elif c < 0:
                parts.append(" - " + _wrap(_negate(t), _ADD))
            else:
                parts.append(" + " + _fmt(t))
        return "".join(parts)
    if isinstance(e, Pow) and not _neg_const_exp(e):
        return _fmt_pow(e.base, e.exp)
    return _fmt_product(e)


def _negate(t):
    from .expr import neg
    return neg(t)


def _fmt_pow(b, k):
    bs = _fmt(b)
    if _prec(b) < _ATOM:
        bs = f"({bs})"
    if isinstance(k, Const) and k.value.denominator == 1 and k.value > 0:
        return f"{bs}^{k.value.numerator}"
    return f"{bs}^({_fmt(k)})"


def _fmt_product(e):
    if isinstance(e, Mul):
        c, rest = split_coeff(e)
        factors = rest.args if isinstance(rest, Mul) else (rest,)
    else:
        c, factors = Fraction(1), (e,)
    num, den = [], []
    for f in factors:
        if isinstance(f, Pow) and _neg_const_exp(f):
            k = -f.exp.value
            den.append(f.base if k == 1 else None)
            if k != 1:
                den[-1] = _fmt_pow(f.base, Const(k))
            else:
                den[-1] = _wrap(f.base, _MUL)
        else:
            num.append(_wrap(f, _MUL))
    sign = "-" if c < 0 else ""
    c = abs(c)
    if c.numerator != 1 or not num:
        num.insert(0, str(c.numerator))
    if c.denominator != 1:
        den.insert(0, str(c.denominator))
    s = sign + "*".join(num)
    if den:
        d = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
        s += "/" + d
    return s


def _wrap(f, level):
    s = _fmt(f)
    if _prec(f) <= level:
        return f"({s})"
    return s
