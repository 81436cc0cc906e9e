"""Rational normal form over a field of generators.

An expression is mapped into Q(g1, ..., gn) where each generator stands for
an atom of the tree:

* a symbol ``v`` or one of its roots ``v^(1/D)`` (then ``v`` itself is
  replaced by ``g^D``),
* ``b^(pi/D)`` for a parameter monomial ``pi`` in the exponent,
* ``B^(1/D)`` for a compound base ``B`` (with ``g^D`` rewritten to ``B``),
* ``exp(u)`` or ``ln(u)``.

Numerator and denominator are python-flint multivariate polynomials kept
coprime with a monic denominator, which makes the form canonical for a fixed
generator order.  Generators are ordered by a global key so unused
generators do not change the normal form.
"""

from __future__ import annotations

import math
from fractions import Fraction

import flint
import mpmath

from . import expr as E
from .expr import Add, Const, Expr, Func, Mul, Pow, Sym

_KIND_SYM, _KIND_DIR, _KIND_ROOT, _KIND_FUNC = range(4)


class Gen:
    """One generator of a rational function field."""

    __slots__ = ("kind", "base", "direction", "D", "name", "key")

    def __init__(self, kind, base, direction=None, D=1, name=None):
        self.kind = kind
        self.base = base            # Sym, compound Expr, or Func argument
        self.direction = direction  # exponent monomial for _KIND_DIR
        self.D = D
        self.name = name            # function name for _KIND_FUNC
        dk = direction.sort_key() if direction is not None else ()
        self.key = (kind, base.sort_key(), dk, name or "")

    def __repr__(self):
        return f"Gen({self.as_expr(1)})"

    def as_expr(self, k):
        """Expression for this generator raised to the integer ``k``."""
        if k == 0:
            return E.ONE
        if self.kind == _KIND_FUNC:
            return E.power(E.func(self.name, self.base), k)
        if self.kind == _KIND_DIR:
            return E.power(self.base, E.mul(Fraction(k, self.D), self.direction))
        return E.power(self.base, Fraction(k, self.D))

    @property
    def faithful(self):
        if self.kind == _KIND_SYM:
            return True
        if self.kind == _KIND_DIR:
            return isinstance(self.base, Sym) and isinstance(self.direction, Sym)
        return False


_fields = {}


class Field:
    """An ordered tuple of generators with a flint polynomial context."""

    def __init__(self, gens):
        self.gens = tuple(gens)
        self.n = len(self.gens)
        names = tuple(f"g{i}" for i in range(self.n)) or ("g0",)
        self.ctx = flint.fmpq_mpoly_ctx.get(names, "lex")
        self.index = {g.key: i for i, g in enumerate(self.gens)}
        self.sym_index = {g.base.name: i for i, g in enumerate(self.gens) if g.kind == _KIND_SYM}
        self.faithful = all(g.faithful for g in self.gens)
        self._gen_polys = self.ctx.gens()[: self.n]
        self._dcache = {}
        self._conv = {}
        self._root_rel = {}

    @classmethod
    def of(cls, gens):
        gens = sorted(gens, key=lambda g: g.key)
        sig = tuple((g.key, g.D) for g in gens)
        f = _fields.get(sig)
        if f is None:
            f = cls(gens)
            _fields[sig] = f
            f._init_relations()
        return f

    def _init_relations(self):
        for i, g in enumerate(self.gens):
            if g.kind == _KIND_ROOT:
                self._root_rel[i] = self.convert(g.base)

    # construction helpers
    def zero(self):
        return Frac(self, self.ctx.from_dict({}), self.ctx.from_dict({(0,) * max(self.n, 1): 1}))

    def one(self):
        return self.const(1)

    def const(self, c):
        one = self.ctx.from_dict({(0,) * max(self.n, 1): 1})
        return Frac(self, one * flint.fmpq(Fraction(c).numerator, Fraction(c).denominator), one, False)

    def gen_poly(self, i, k=1):
        return self._gen_polys[i] ** k

    def symbol(self, name):
        i = self.sym_index[name]
        g = self.gens[i]
        return Frac(self, self.gen_poly(i, g.D), self.one().den, False)

    def has_symbol(self, name):
        return name in self.sym_index

    def convert(self, e: Expr) -> "Frac":
        """Map an expression whose atoms all belong to this field."""
        memo = self._conv
        got = memo.get(e)
        if got is not None:
            return got
        r = self._convert(e)
        memo[e] = r
        return r

    def _convert(self, e):
        if isinstance(e, Const):
            return self.const(e.value)
        if isinstance(e, Sym):
            return self.symbol(e.name)
        if isinstance(e, Add):
            acc = self.zero()
            for t in e.args:
                acc = acc + self.convert(t)
            return acc
        if isinstance(e, Mul):
            acc = self.one()
            for t in e.args:
                acc = acc * self.convert(t)
            return acc
        if isinstance(e, Func):
            arg = canonical(e.arg)
            i = self.index[Gen(_KIND_FUNC, arg, name=e.name).key]
            return self._genfrac(i, 1)
        if isinstance(e, Pow):
            return self._convert_pow(e)
        raise TypeError(f"cannot convert {e!r}")

    def _genfrac(self, i, k):
        one = self.ctx.from_dict({(0,) * self.n: 1})
        if k >= 0:
            return Frac(self, self.gen_poly(i, k), one, False)
        return Frac(self, one, self.gen_poly(i, -k), False)

    def _convert_pow(self, e):
        b, ex = e.base, e.exp
        if E.is_integer_const(ex):
            return self.convert(b) ** int(ex.value)
        c0, parts = split_exponent(ex)
        base = b if isinstance(b, (Const, Sym)) else canonical(b)
        acc = self.one()
        if c0:
            if isinstance(base, Sym):
                i = self.sym_index[base.name]
                D = self.gens[i].D
                acc = acc * self._genfrac(i, int(c0 * D))
            elif c0.denominator == 1:
                acc = acc * self.convert(base) ** int(c0)
            else:
                whole = math.floor(c0)
                rest = c0 - whole
                i = self.index[Gen(_KIND_ROOT, base).key]
                D = self.gens[i].D
                acc = acc * self._genfrac(i, int(rest * D))
                if whole:
                    acc = acc * self.convert(base) ** whole
        for mono, c in parts:
            i = self.index[Gen(_KIND_DIR, base, mono).key]
            D = self.gens[i].D
            acc = acc * self._genfrac(i, int(c * D))
        return acc

    # calculus
    def dgen(self, i, v) -> "Frac":
        """Derivative of generator i with respect to symbol v."""
        key = (i, v)
        got = self._dcache.get(key)
        if got is None:
            got = self._dgen(i, v)
            self._dcache[key] = got
        return got

    def _dgen(self, i, v):
        g = self.gens[i]
        if g.kind == _KIND_SYM:
            if g.base.name != v:
                return self.zero()
            # v = g^D  =>  dg/dv = 1/(D g^(D-1))
            return Frac(self, self.one().num, self.gen_poly(i, g.D - 1) * g.D)
        if g.kind == _KIND_FUNC:
            du = self.convert(g.base).diff(v)
            if du.is_zero():
                return self.zero()
            if g.name == "exp":
                return self._genfrac(i, 1) * du
            return du / self.convert(g.base)
        if g.kind == _KIND_DIR:
            if v in g.direction.free_symbols():
                raise ValueError("differentiation with respect to a symbol in an exponent is not supported")
            db = self.convert(g.base).diff(v)
            if db.is_zero():
                return self.zero()
            coef = self.convert(g.direction) * self.const(Fraction(1, g.D))
            return self._genfrac(i, 1) * coef * db / self.convert(g.base)
        # compound root r = B^(1/D):  dr = r B' / (D B)
        B = self._root_rel[i]
        db = B.diff(v)
        if db.is_zero():
            return self.zero()
        return self._genfrac(i, 1) * db / (B * self.const(g.D))

    def depends_on(self, i, v):
        return not self.dgen(i, v).is_zero()

    # numerics
    def gen_values(self, point, prec=50):
        """Values of all generators at a point (dict name -> Fraction/mpf)."""
        vals = []
        for g in self.gens:
            vals.append(_gen_value(g, point, prec, self))
        return vals


def split_exponent(ex):
    """Write an exponent as c0 + sum c_i * mono_i with parameter monomials."""
    c0 = Fraction(0)
    parts = {}
    terms = ex.args if isinstance(ex, Add) else (ex,)
    for t in terms:
        c, rest = E.split_coeff(t)
        if rest is E.ONE:
            c0 += c
        else:
            if rest.free_variables():
                raise ValueError(f"exponent depends on a jet variable: {ex}")
            parts[rest] = parts.get(rest, Fraction(0)) + c
    return c0, sorted(parts.items(), key=lambda kv: kv[0].sort_key())


def _gen_value(g, point, prec, field):
    from .evaluate import DomainViolation, evaluate, fractional_power
    if g.kind == _KIND_SYM:
        v = point[g.base.name] if g.base.name in point else _unbound(g.base.name)
        if g.D == 1:
            return v
        return fractional_power(v, Fraction(1, g.D), prec)
    if g.kind == _KIND_FUNC:
        return evaluate(E.func(g.name, g.base), point, prec)
    b = evaluate(g.base, point, prec)
    if g.kind == _KIND_ROOT:
        return fractional_power(b, Fraction(1, g.D), prec)
    ex = evaluate(g.direction, point, prec)
    if isinstance(ex, Fraction):
        return fractional_power(b, ex / g.D, prec)
    if b <= 0:
        raise DomainViolation("non-positive base raised to a symbolic power")
    with mpmath.workdps(prec + 10):
        return mpmath.power(mpmath.mpf(b.numerator) / b.denominator if isinstance(b, Fraction) else b, ex / g.D)


def _unbound(name):
    from .evaluate import UnboundSymbol
    raise UnboundSymbol(f"symbol {name!r} is not bound")


class Frac:
    """A reduced quotient num/den of flint polynomials over a Field."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den, normalize=True):
        self.field = field
        if normalize:
            num, den = _normalize(field, num, den)
        self.num = num
        self.den = den

    def is_zero(self):
        return self.num.is_zero()

    def is_const(self):
        return self.num.is_constant() and self.den.is_constant()

    def const_value(self):
        n = _poly_const(self.num)
        d = _poly_const(self.den)
        return n / d

    def __add__(self, o):
        if not isinstance(o, Frac):
            o = self.field.const(o)
        if self.num.is_zero():
            return o
        if o.num.is_zero():
            return self
        if self.den == o.den:
            return Frac(self.field, self.num + o.num, self.den)
        if self.den.is_constant() and o.den.is_constant():
            return Frac(self.field, self.num * o.den + o.num * self.den, self.den * o.den)
        g = self.den.gcd(o.den)
        if g.is_one():
            return Frac(self.field, self.num * o.den + o.num * self.den, self.den * o.den)
        a = o.den / g
        b = self.den / g
        return Frac(self.field, self.num * a + o.num * b, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        return Frac(self.field, -self.num, self.den, False)

    def __sub__(self, o):
        if not isinstance(o, Frac):
            o = self.field.const(o)
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Frac):
            o = self.field.const(o)
        if self.num.is_zero() or o.num.is_zero():
            return self.field.zero()
        if o.is_const() and o.den.is_one():
            return Frac(self.field, self.num * o.num, self.den, False)
        if self.is_const() and self.den.is_one():
            return Frac(self.field, o.num * self.num, o.den, False)
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num / g1, o.den / g1) if not g1.is_one() else (self.num, o.den)
        n2, d1 = (o.num / g2, self.den / g2) if not g2.is_one() else (o.num, self.den)
        return Frac(self.field, n1 * n2, d1 * d2, _has_roots(self.field))

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("division by an identically zero rational function")
        return Frac(self.field, self.den, self.num)

    def __truediv__(self, o):
        if not isinstance(o, Frac):
            o = self.field.const(o)
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self.inverse() * o

    def __pow__(self, k):
        k = int(k)
        if k == 0:
            return self.field.one()
        if k < 0:
            return self.inverse() ** (-k)
        return Frac(self.field, self.num ** k, self.den ** k, _has_roots(self.field))

    def __eq__(self, o):
        if not isinstance(o, Frac):
            o = self.field.const(o)
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def diff_gen(self, i):
        """Partial derivative with respect to generator i."""
        n, d = self.num, self.den
        dn = n.derivative(i)
        dd = d.derivative(i)
        if dd.is_zero():
            return Frac(self.field, dn, d)
        return Frac(self.field, dn * d - n * dd, d * d)

    def diff(self, v) -> "Frac":
        """Partial derivative with respect to the symbol named v."""
        f = self.field
        acc = f.zero()
        nd, dd = self.num.degrees(), self.den.degrees()
        for i in range(f.n):
            if not nd[i] and not dd[i]:
                continue
            dg = f.dgen(i, v)
            if dg.is_zero():
                continue
            acc = acc + self.diff_gen(i) * dg
        return acc

    def lift(self, field):
        """Re-express in a field whose generators include ours."""
        if field is self.field:
            return self
        imgs = []
        for g in self.field.gens:
            j = field.index[g.key]
            h = field.gens[j]
            imgs.append(field.gen_poly(j, h.D // g.D))
        if not imgs:
            return field.const(_poly_const(self.num) / _poly_const(self.den))
        n = self.num.compose(*imgs, ctx=field.ctx)
        d = self.den.compose(*imgs, ctx=field.ctx)
        return Frac(field, n, d)

    def to_expr(self) -> Expr:
        return frac_to_expr(self)

    def evaluate(self, point, prec=50, gen_values=None):
        vals = gen_values if gen_values is not None else self.field.gen_values(point, prec)
        return eval_quotient(self.num, self.den, vals, prec)

    def __repr__(self):
        return f"Frac({self.to_expr()})"


def _poly_const(p):
    if p.is_zero():
        return Fraction(0)
    d = p.to_dict()
    (_, c), = d.items()
    return Fraction(int(c.p), int(c.q))


def _has_roots(field):
    return any(g.kind == _KIND_ROOT for g in field.gens)


def _normalize(field, num, den):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return num, field.one().den
    if field._root_rel:
        num, den = _reduce_roots(field, num, den)
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _reduce_roots(field, num, den):
    """Rewrite r^k with k >= D as r^(k mod D) * B^(k div D) for compound roots."""
    for i, B in field._root_rel.items():
        D = field.gens[i].D
        num, cn = _reduce_one(field, num, i, D, B)
        den, cd = _reduce_one(field, den, i, D, B)
        # num/cn / (den/cd)
        if cn is not None or cd is not None:
            if cd is not None:
                num = num * cd
            if cn is not None:
                den = den * cn
    return num, den


def _reduce_one(field, poly, i, D, B):
    terms = poly.to_dict()
    if all(m[i] < D for m in terms):
        return poly, None
    top = max(m[i] // D for m in terms)
    bn, bd = B.num, B.den
    bn_pows = [bn ** j for j in range(top + 1)]
    bd_pows = [bd ** j for j in range(top + 1)]
    ctx = field.ctx
    acc = ctx.from_dict({})
    groups = {}
    for m, c in terms.items():
        j = m[i] // D
        mm = list(m)
        mm[i] = m[i] % D
        groups.setdefault(j, {})[tuple(mm)] = c
    for j, d in groups.items():
        acc += ctx.from_dict(d) * bn_pows[j] * bd_pows[top - j]
    return acc, bd_pows[top]


def frac_to_expr(F: Frac) -> Expr:
    field = F.field
    if F.num.is_zero():
        return E.ZERO
    den = F.den
    dterms = den.to_dict()
    n = field.n
    # monomial and rational content of the denominator
    mono = [int(min(m[k] for m in dterms)) for k in range(n)] if n else []
    coeffs = [Fraction(int(c.p), int(c.q)) for c in dterms.values()]
    content = _frac_gcd(coeffs)
    lead = next(iter(_sorted_terms(dterms)))[1]
    if Fraction(int(lead.p), int(lead.q)) < 0:
        content = -content
    rest_terms = {}
    for m, c in dterms.items():
        mm = tuple(a - b for a, b in zip(m, mono))
        rest_terms[mm] = Fraction(int(c.p), int(c.q)) / content
    num_terms = []
    for m, c in _sorted_terms(F.num.to_dict()):
        mm = tuple(a - b for a, b in zip(m, mono))
        num_terms.append(_monomial_expr(field, mm, Fraction(int(c.p), int(c.q)) / content))
    numer = E.add(*num_terms)
    if len(rest_terms) == 1 and all(v == 0 for v in next(iter(rest_terms))):
        return numer
    dexpr = E.add(*(_monomial_expr(field, m, c) for m, c in rest_terms.items()))
    return E.mul(numer, E.power(dexpr, -1))


def _sorted_terms(d):
    return sorted(d.items(), key=lambda kv: kv[0], reverse=True)


def _frac_gcd(vals):
    g_num = 0
    l_den = 1
    for v in vals:
        g_num = math.gcd(g_num, v.numerator)
        l_den = l_den * v.denominator // math.gcd(l_den, v.denominator)
    return Fraction(g_num, l_den)


def _monomial_expr(field, m, c):
    factors = [E.Const(c)]
    for k, e in enumerate(m):
        if e:
            factors.append(field.gens[k].as_expr(int(e)))
    return E.mul(*factors)


# ---------------------------------------------------------------------------
# building fields from expressions

def canonical(e: Expr) -> Expr:
    """Canonical form used for compound bases and function arguments."""
    if isinstance(e, (Const, Sym)):
        return e
    return to_frac(e).to_expr()


def collect_gens(exprs, base_syms=()):
    """Generators needed to represent every expression in ``exprs``."""
    sym_D = {s: 1 for s in base_syms}
    other = {}
    seen = set()

    def visit(e):
        if e in seen:
            return
        seen.add(e)
        if isinstance(e, Const):
            return
        if isinstance(e, Sym):
            sym_D.setdefault(e.name, 1)
            return
        if isinstance(e, (Add, Mul)):
            for a in e.args:
                visit(a)
            return
        if isinstance(e, Func):
            arg = canonical(e.arg)
            visit(arg)
            g = Gen(_KIND_FUNC, arg, name=e.name)
            other.setdefault(g.key, g)
            return
        b, ex = e.base, e.exp
        if E.is_integer_const(ex):
            visit(b)
            return
        c0, parts = split_exponent(ex)
        for mono, _ in parts:
            visit(mono)
        if isinstance(b, Sym):
            visit(b)
            base = b
            if c0.denominator != 1:
                sym_D[b.name] = _lcm(sym_D.get(b.name, 1), c0.denominator)
        else:
            base = b if isinstance(b, Const) else canonical(b)
            visit(base)
            if c0.denominator != 1:
                g = Gen(_KIND_ROOT, base)
                old = other.get(g.key)
                g.D = _lcm(old.D if old else 1, c0.denominator)
                other[g.key] = g
        for mono, c in parts:
            g = Gen(_KIND_DIR, base, mono)
            old = other.get(g.key)
            g.D = _lcm(old.D if old else 1, c.denominator)
            other[g.key] = g

    for e in exprs:
        visit(e)
    gens = [Gen(_KIND_SYM, Sym(s), D=D) for s, D in sym_D.items()]
    gens.extend(other.values())
    return gens


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def field_for(exprs, base_syms=()) -> Field:
    return Field.of(collect_gens(exprs, base_syms))


def to_frac(e: Expr, field: Field | None = None) -> Frac:
    if field is None:
        field = field_for([e])
    return field.convert(e)


def merge_fields(*fields) -> Field:
    gens = {}
    for f in fields:
        for g in f.gens:
            old = gens.get(g.key)
            if old is None:
                gens[g.key] = Gen(g.kind, g.base, g.direction, g.D, g.name)
            else:
                old.D = _lcm(old.D, g.D)
    return Field.of(gens.values())


# ---------------------------------------------------------------------------
# numeric evaluation of polynomials

_mpf_terms_cache = {}


def eval_poly(p, vals, prec=50):
    if all(isinstance(v, Fraction) for v in vals):
        if not vals:
            return _poly_const(p)
        r = p(*[flint.fmpq(v.numerator, v.denominator) for v in vals])
        return Fraction(int(r.p), int(r.q))
    with mpmath.workdps(prec + 10):
        mv = [mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v for v in vals]
        total = mpmath.mpf(0)
        for m, c in p.to_dict().items():
            t = mpmath.mpf(int(c.p)) / int(c.q)
            for v, k in zip(mv, m):
                if k:
                    t *= v ** int(k)
            total += t
        return total


def eval_quotient(num, den, vals, prec=50):
    from .evaluate import DivisionByZero
    d = eval_poly(den, vals, prec)
    if d == 0:
        raise DivisionByZero("denominator vanishes at the point")
    n = eval_poly(num, vals, prec)
    if isinstance(n, Fraction) and isinstance(d, Fraction):
        return n / d
    with mpmath.workdps(prec + 10):
        return mpmath.mpf(n) / d if not isinstance(n, Fraction) else (mpmath.mpf(n.numerator) / n.denominator) / d
