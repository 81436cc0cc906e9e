"""Public symbolic operations built on the rational normal form."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import expr as E
from .evaluate import DEFAULT_PRECISION, EvaluationError
from .expr import Add, Const, Expr, Func, Mul, Pow, Sym
from .ratfunc import Frac, eval_poly, to_frac

BOX = (1, 3)
DENOMINATORS = tuple(range(1, 8))
MIN_DENOMINATOR = 1e-6


def simplify(e: Expr) -> Expr:
    """Canonical numerator/denominator form (best effort beyond rational)."""
    e = E.sympify(e)
    if isinstance(e, (Const, Sym)):
        return e
    return to_frac(e).to_expr()


def differentiate(e: Expr, v) -> Expr:
    e = E.sympify(e)
    name = v.name if isinstance(v, Sym) else str(v)
    return to_frac(e).diff(name).to_expr()


def substitute(e: Expr, bindings) -> Expr:
    """Simultaneous substitution of symbols, followed by simplify."""
    return simplify(replace(e, bindings))


def replace(e: Expr, bindings) -> Expr:
    """Simultaneous substitution without the final simplification."""
    table = {}
    for k, v in bindings.items():
        table[k.name if isinstance(k, Sym) else str(k)] = E.sympify(v)
    memo = {}

    def go(n):
        got = memo.get(n)
        if got is not None:
            return got
        if isinstance(n, Const):
            r = n
        elif isinstance(n, Sym):
            r = table.get(n.name, n)
        elif isinstance(n, Add):
            r = E.add(*(go(a) for a in n.args))
        elif isinstance(n, Mul):
            r = E.mul(*(go(a) for a in n.args))
        elif isinstance(n, Pow):
            r = E.power(go(n.base), go(n.exp))
        else:
            r = E.func(n.name, go(n.arg))
        memo[n] = r
        return r

    return go(E.sympify(e))


@dataclass(frozen=True)
class Constraint:
    kind: str   # "nonzero" or "positive"
    expr: Expr

    def __str__(self):
        op = "!=" if self.kind == "nonzero" else ">"
        return f"{self.expr} {op} 0"


def domain_constraints(e: Expr):
    """Denominators that must not vanish and bases that must stay positive."""
    out = []
    seen = set()
    stack = [E.sympify(e)]
    while stack:
        n = stack.pop()
        if n in seen or isinstance(n, (Const, Sym)):
            continue
        seen.add(n)
        if isinstance(n, Pow):
            ex = n.exp
            if not (isinstance(ex, Const) and ex.value.denominator == 1):
                out.append(Constraint("positive", simplify(n.base)))
            elif ex.value < 0:
                out.append(Constraint("nonzero", simplify(n.base)))
            stack.append(n.base)
            stack.append(ex)
        elif isinstance(n, Func):
            if n.name == "ln":
                out.append(Constraint("positive", simplify(n.arg)))
            stack.append(n.arg)
        else:
            stack.extend(n.args)
    uniq = []
    for c in out:
        if isinstance(c.expr, Const):
            continue
        if c not in uniq:
            uniq.append(c)
    return uniq


def simplify_with_domain(e: Expr):
    return simplify(e), domain_constraints(e)


# ---------------------------------------------------------------------------
# zero testing

class Outcome(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Policy:
    numeric: bool = True
    points: int = 25
    tolerance: float = 1e-30
    seed: int = 0
    precision: int = DEFAULT_PRECISION

    @classmethod
    def symbolic_only(cls):
        return cls(numeric=False)


@dataclass
class ZeroDecision:
    outcome: Outcome
    method: str
    witness: dict | None = None
    value: object = None
    points_checked: int = 0

    def __bool__(self):
        return self.outcome is Outcome.YES


def sample_points(names, n, seed=0, box=BOX, denominators=DENOMINATORS, constraints=()):
    """Deterministic rational sample points, one dict per point.

    Names are visited in sorted order so the stream depends only on the
    symbol set and the seed.
    """
    rng = random.Random(seed)
    names = sorted(names)
    lo, hi = box
    out = []
    for _ in range(n):
        pt = {}
        for v in names:
            d = rng.choice(denominators)
            pt[v] = Fraction(rng.randint(lo * d, hi * d), d)
        out.append(pt)
    return out


def frac_symbols(F: Frac):
    names = set()
    for g in F.field.gens:
        names |= g.base.free_symbols()
        if g.direction is not None:
            names |= g.direction.free_symbols()
    return names


def point_values(F: Frac, pt, prec):
    """Evaluate F at pt; None if the point is invalid for F."""
    try:
        vals = F.field.gen_values(pt, prec)
        d = eval_poly(F.den, vals, prec)
        if abs(d) < MIN_DENOMINATOR:
            return None
        n = eval_poly(F.num, vals, prec)
    except (EvaluationError, ZeroDivisionError):
        return None
    if isinstance(n, Fraction) and isinstance(d, Fraction):
        return n / d
    with mpmath.workdps(prec + 10):
        return mpmath.mpf(n) / d if not isinstance(n, Fraction) else (mpmath.mpf(n.numerator) / n.denominator) / d


def frac_equals_zero(F: Frac, policy: Policy = Policy()) -> ZeroDecision:
    if F.is_zero():
        return ZeroDecision(Outcome.YES, "symbolic")
    if F.is_const():
        return ZeroDecision(Outcome.NO, "symbolic", value=F.const_value())
    if F.field.faithful:
        dec = ZeroDecision(Outcome.NO, "symbolic")
        if policy.numeric:
            _find_witness(F, policy, dec)
        return dec
    if not policy.numeric:
        return ZeroDecision(Outcome.UNKNOWN, "symbolic")
    return _numeric_zero(F, policy)


def _find_witness(F, policy, dec):
    for pt in sample_points(frac_symbols(F), 4 * policy.points, policy.seed):
        v = point_values(F, pt, policy.precision)
        if v is not None and v != 0:
            dec.witness, dec.value = pt, v
            return


def _numeric_zero(F, policy):
    names = frac_symbols(F)
    valid = 0
    budget = 20 * policy.points
    for pt in sample_points(names, budget, policy.seed):
        v = point_values(F, pt, policy.precision)
        if v is None:
            continue
        valid += 1
        if isinstance(v, Fraction):
            if v != 0:
                return ZeroDecision(Outcome.NO, "numeric", pt, v, valid)
        elif abs(v) >= policy.tolerance:
            return ZeroDecision(Outcome.NO, "numeric", pt, v, valid)
        if valid >= policy.points:
            return ZeroDecision(Outcome.YES, "numeric", points_checked=valid)
    if valid == 0:
        return ZeroDecision(Outcome.UNKNOWN, "numeric")
    return ZeroDecision(Outcome.YES, "numeric", points_checked=valid)


def equals_zero(e, policy: Policy = Policy()) -> ZeroDecision:
    """Decide e == 0: Yes / No / Unknown with the evidence used."""
    if isinstance(e, Frac):
        return frac_equals_zero(e, policy)
    try:
        F = to_frac(E.sympify(e))
    except ZeroDivisionError:
        return ZeroDecision(Outcome.UNKNOWN, "symbolic")
    return frac_equals_zero(F, policy)


def equal(a, b, policy: Policy = Policy()) -> ZeroDecision:
    return equals_zero(E.sub(E.sympify(a), E.sympify(b)), policy)
