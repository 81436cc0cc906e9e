"""Immutable, hash-consed expression trees.

Nodes are interned, so structurally equal trees are the same object and
``is`` / ``==`` agree.  Constructors apply a light normalisation: sums and
products are flattened, like terms and like bases are collected, children are
sorted into a canonical order and trivial powers disappear.  Full canonical
forms for rational functions come from :func:`odeinv.kernel.simplify`.
"""

from __future__ import annotations

import weakref
from fractions import Fraction
from numbers import Rational

VARIABLES = ("x", "y", "p", "q")
_VAR_INDEX = {v: i for i, v in enumerate(VARIABLES)}

_CONST, _SYM, _POW, _MUL, _ADD, _FUNC = range(6)
FUNCTIONS = ("exp", "ln")

_interned = weakref.WeakValueDictionary()


class Expr:
    __slots__ = ("_args", "_key", "__weakref__")

    _rank = -1

    def __new__(cls, *args):
        tag = (cls, args)
        node = _interned.get(tag)
        if node is None:
            node = object.__new__(cls)
            node._args = args
            node._key = None
            _interned[tag] = node
        return node

    def __reduce__(self):
        return (type(self), self._args)

    @property
    def args(self):
        return self._args

    def sort_key(self):
        if self._key is None:
            self._key = (self._rank, self._payload())
        return self._key

    # arithmetic sugar
    def __add__(self, other):
        return add(self, sympify(other))

    def __radd__(self, other):
        return add(sympify(other), self)

    def __sub__(self, other):
        return add(self, neg(sympify(other)))

    def __rsub__(self, other):
        return add(sympify(other), neg(self))

    def __mul__(self, other):
        return mul(self, sympify(other))

    def __rmul__(self, other):
        return mul(sympify(other), self)

    def __truediv__(self, other):
        return mul(self, power(sympify(other), -1))

    def __rtruediv__(self, other):
        return mul(sympify(other), power(self, -1))

    def __pow__(self, other):
        return power(self, sympify(other))

    def __neg__(self):
        return neg(self)

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self is other
        if isinstance(other, (int, Fraction)):
            return self is Const(Fraction(other))
        return NotImplemented

    def __hash__(self):
        return id(self)

    def __repr__(self):
        from .printer import to_str
        return f"Expr({to_str(self)!r})"

    def __str__(self):
        from .printer import to_str
        return to_str(self)

    def free_symbols(self):
        out = set()
        _collect_symbols(self, out)
        return out

    def free_variables(self):
        return {s for s in self.free_symbols() if s in _VAR_INDEX}

    def parameters(self):
        return {s for s in self.free_symbols() if s not in _VAR_INDEX}


class Const(Expr):
    __slots__ = ()
    _rank = _CONST

    def __new__(cls, value):
        return Expr.__new__(cls, Fraction(value))

    @property
    def value(self) -> Fraction:
        return self._args[0]

    def _payload(self):
        return self._args[0]


class Sym(Expr):
    __slots__ = ()
    _rank = _SYM

    def __new__(cls, name):
        return Expr.__new__(cls, str(name))

    @property
    def name(self) -> str:
        return self._args[0]

    @property
    def is_variable(self):
        return self._args[0] in _VAR_INDEX

    def _payload(self):
        # parameters sort before the jet variables x, y, p, q
        name = self._args[0]
        if name in _VAR_INDEX:
            return (1, "", _VAR_INDEX[name])
        return (0, name, 0)


class Pow(Expr):
    __slots__ = ()
    _rank = _POW

    @property
    def base(self):
        return self._args[0]

    @property
    def exp(self):
        return self._args[1]

    def _payload(self):
        return (self._args[0].sort_key(), self._args[1].sort_key())


class Mul(Expr):
    __slots__ = ()
    _rank = _MUL

    def _payload(self):
        return tuple(a.sort_key() for a in self._args)


class Add(Expr):
    __slots__ = ()
    _rank = _ADD

    def _payload(self):
        return tuple(a.sort_key() for a in self._args)


class Func(Expr):
    __slots__ = ()
    _rank = _FUNC

    @property
    def name(self):
        return self._args[0]

    @property
    def arg(self):
        return self._args[1]

    def _payload(self):
        return (self._args[0], self._args[1].sort_key())


ZERO = Const(0)
ONE = Const(1)
NEG_ONE = Const(-1)


def sympify(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not an expression")
    if isinstance(v, (int, Fraction, Rational)):
        return Const(Fraction(v))
    if isinstance(v, str):
        from .parser import parse
        return parse(v)
    raise TypeError(f"cannot convert {type(v).__name__} to Expr")


def symbols(names: str):
    out = tuple(Sym(n) for n in names.replace(",", " ").split())
    return out[0] if len(out) == 1 else out


def _collect_symbols(e, out):
    stack = [e]
    seen = set()
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if isinstance(n, Sym):
            out.add(n.name)
        elif isinstance(n, Func):
            stack.append(n.arg)
        elif not isinstance(n, Const):
            stack.extend(n.args)


def is_integer_const(e) -> bool:
    return isinstance(e, Const) and e.value.denominator == 1


def split_coeff(e):
    """Split a term into (rational coefficient, remaining factor)."""
    if isinstance(e, Const):
        return e.value, ONE
    if isinstance(e, Mul) and isinstance(e.args[0], Const):
        rest = e.args[1:]
        return e.args[0].value, (rest[0] if len(rest) == 1 else Mul(*rest))
    return Fraction(1), e


def base_exp(e):
    if isinstance(e, Pow):
        return e.base, e.exp
    return e, ONE


def add(*terms) -> Expr:
    coeffs = {}
    order = []
    const = Fraction(0)
    stack = list(terms)
    stack.reverse()
    while stack:
        t = sympify(stack.pop())
        if isinstance(t, Add):
            stack.extend(reversed(t.args))
            continue
        if isinstance(t, Const):
            const += t.value
            continue
        c, rest = split_coeff(t)
        if rest in coeffs:
            coeffs[rest] += c
        else:
            coeffs[rest] = c
            order.append(rest)
    out = []
    for rest in order:
        c = coeffs[rest]
        if c:
            out.append(_scale(rest, c))
    if not out:
        return Const(const)
    if const:
        out.append(Const(const))
    if len(out) == 1:
        return out[0]
    out.sort(key=_term_key)
    return Add(*out)


def _term_key(t):
    c, rest = split_coeff(t)
    if rest is ONE:
        return ((-1,), c)
    return (rest.sort_key(), c)


def _scale(rest, c):
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul(Const(c), *rest.args)
    return Mul(Const(c), rest)


def mul(*factors) -> Expr:
    coeff = Fraction(1)
    exps = {}
    order = []
    stack = list(factors)
    stack.reverse()
    while stack:
        f = sympify(stack.pop())
        if isinstance(f, Mul):
            stack.extend(reversed(f.args))
            continue
        if isinstance(f, Const):
            coeff *= f.value
            if not coeff:
                return ZERO
            continue
        b, e = base_exp(f)
        if b in exps:
            exps[b] = add(exps[b], e)
        else:
            exps[b] = e
            order.append(b)
    out = []
    for b in order:
        e = exps[b]
        if e is ZERO:
            continue
        pe = power(b, e) if e is not ONE else b
        if isinstance(pe, Const):
            coeff *= pe.value
        elif isinstance(pe, Mul):
            c, rest = split_coeff(pe)
            coeff *= c
            out.extend(rest.args if isinstance(rest, Mul) else [rest])
        else:
            out.append(pe)
    if not coeff:
        return ZERO
    if not out:
        return Const(coeff)
    if len(out) > 1:
        out.sort(key=_factor_key)
        # two factors may share a base after a Pow-of-Mul expansion
        if any(base_exp(a)[0] is base_exp(b)[0] for a, b in zip(out, out[1:])):
            return mul(Const(coeff), *out)
    if coeff == 1 and len(out) == 1:
        return out[0]
    if coeff == 1:
        return Mul(*out)
    return Mul(Const(coeff), *out)


def _factor_key(f):
    b, e = base_exp(f)
    return (b.sort_key(), e.sort_key())


def neg(e) -> Expr:
    return mul(NEG_ONE, e)


def sub(a, b) -> Expr:
    return add(a, neg(sympify(b)))


def div(a, b) -> Expr:
    return mul(a, power(sympify(b), -1))


def _exact_root(v: Fraction, d: int):
    """Return v**(1/d) as a Fraction if it is one, else None (v >= 0)."""
    n, m = iroot(v.numerator, d), iroot(v.denominator, d)
    if n is not None and m is not None:
        return Fraction(n, m)
    return None


def iroot(n: int, d: int):
    """Exact integer d-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n < 2:
        return n
    r = int(round(n ** (1.0 / d))) if n.bit_length() < 1000 else 1 << (n.bit_length() // d)
    # Newton polish for big inputs
    for _ in range(200):
        if r <= 0:
            r = 1
        nr = ((d - 1) * r + n // r ** (d - 1)) // d
        if nr >= r:
            break
        r = nr
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** d == n:
            return c
    return None


def power(b, e) -> Expr:
    b = sympify(b)
    e = sympify(e)
    if e is ZERO:
        return ONE
    if e is ONE:
        return b
    if isinstance(b, Const):
        v = b.value
        if v == 1:
            return ONE
        if isinstance(e, Const):
            k = e.value
            if k.denominator == 1:
                if v == 0 and k < 0:
                    raise ZeroDivisionError("0 raised to a negative power")
                return Const(v ** int(k))
            if v == 0 and k > 0:
                return ZERO
            if v > 0:
                whole = k.numerator // k.denominator
                frac = k - whole
                r = _exact_root(v, frac.denominator)
                if r is not None:
                    return Const(v ** whole * r ** frac.numerator)
        return Pow(b, e)
    if isinstance(e, Const) and e.value.denominator == 1:
        k = e.value
        if isinstance(b, Pow):
            return power(b.base, mul(b.exp, e))
        if isinstance(b, Mul):
            return mul(*(power(f, e) for f in b.args))
    return Pow(b, e)


def func(name, arg) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    arg = sympify(arg)
    if isinstance(arg, Const):
        if name == "exp" and arg.value == 0:
            return ONE
        if name == "ln" and arg.value == 1:
            return ZERO
    if name == "ln" and isinstance(arg, Func) and arg.name == "exp":
        return arg.arg
    if name == "exp" and isinstance(arg, Func) and arg.name == "ln":
        return arg.arg
    return Func(name, arg)


def exp(arg):
    return func("exp", arg)


def ln(arg):
    return func("ln", arg)


X, Y, P, Q = (Sym(v) for v in VARIABLES)
