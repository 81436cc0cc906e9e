"""Relative invariants lambda, gamma and the absolute invariants alpha, beta.

The formula functions below are written once and evaluated over whatever
arithmetic the table entries carry: exact rational functions (Frac), plain
Fractions at a jet point, or mpmath floats.  Only integer constants appear,
so the same code serves all three.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .jet import ENTRY_NAMES, OdeSpec
from .kernel import Outcome, Policy, equals_zero, sample_points
from .kernel import expr as E
from .kernel.evaluate import EvaluationError
from .kernel.ops import replace, simplify

LAMBDA_RANGE = range(4, 21)
GAMMA_RANGE = range(4, 17)
ALPHA_RANGE = range(1, 18)
BETA_RANGE = range(1, 12)


class OutOfClass(ValueError):
    """A denominator of the requested invariants vanishes identically."""

    def __init__(self, precondition, message):
        super().__init__(message)
        self.precondition = precondition


# ---------------------------------------------------------------------------
# formulas

def lambda_formulas(t):
    """lambda_4 .. lambda_20 from a table-like mapping."""
    f2, f3, f4 = t["f2"], t["f3"], t["f4"]
    f22, f23, f24, f33, f34, f44 = (t[k] for k in ("f22", "f23", "f24", "f33", "f34", "f44"))
    f224, f233, f234, f244, f333, f334, f344, f444 = (
        t[k] for k in ("f224", "f233", "f234", "f244", "f333", "f334", "f344", "f444"))
    # D f2, D f3, D f4, D f23, D f24, D f33, D f34, D f44, D^2 f3, D^2 f4
    Df2, Df3, Df4 = t["d1_2"], t["d1_3"], t["d1_4"]
    Df23, Df24, Df33, Df34, Df44 = t["d1_6"], t["d1_7"], t["d1_8"], t["d1_9"], t["d1_10"]
    DDf3, DDf4 = t["d2_3"], t["d2_4"]

    L = {}
    L[4] = f44
    L[5] = (2*f34*f4 - 2*f3*f44 - 6*f24 + 3*f33) / 3
    L[6] = f444
    L[7] = (2*f4*f444 + 3*f344) / 3
    L[8] = (4*f444*f4**2 + 12*f4*f344 + 4*f4*f44**2 + 9*f334 + 6*f34*f44) / 9
    L[9] = (2*f444*f4**2 + 2*f4*f44**2 + 3*f4*f344 + 3*f444*f3 + 9*f244 + 3*f34*f44) / 9
    L[10] = (-4*f4**2*f344 + 4*f4*f444*f3 + 12*f4*f244 - 12*f334*f4 - 4*f4*f34*f44
             - 6*f34**2 - 9*f333 + 4*f44**2*f3 + 6*f3*f344 + 12*f24*f44 + 18*f234) / 18
    L[11] = (-4*f4*f3*f44**2 - 6*f44*f34*f3 - 18*f44*f23 - 12*f44*f24*f4 + 4*f44*f34*f4**2
             - 6*f444*f3**2 - 36*f3*f244 - 4*f3*f444*f4**2 + 9*f3*f334 + 12*f34**2*f4
             + 9*f34*f33 + 4*f4**3*f344 - 12*f4**2*f244 + 12*f334*f4**2 + 9*f4*f333
             - 54*f224 + 27*f233) / 27
    L[12] = (-f4**2 - 3*f3 + 3*Df4) / 3
    L[13] = (-2*f4**3 - 9*f4*f3 + 6*f4*Df4 - 27*f2 + 9*Df3) / 9
    L[14] = (3*Df44 + f44*f4) / 3
    L[15] = (2*f44*f4**2 + 3*f3*f44 + 6*f4*Df44 - 9*f24 + 9*Df34) / 9
    L[16] = (4*f4**2*Df44 - 2*f4**2*f34 - 3*f4*f33 + 12*f4*Df34 + 4*f4*f44*Df4
             - 12*f24*f4 + 6*f34*Df4 - 18*f23 + 9*Df33) / 9
    L[17] = (2*f44*f4**3 - 6*f4**2*f34 + 6*f4**2*Df44 - 9*f4*f33 + 12*f4*f3*f44
             + 9*f4*Df34 - 9*f24*f4 + 9*f3*Df44 - 27*f23 + 27*f2*f44 + 27*Df24) / 27
    L[18] = (-9*f3**2*f44 + 9*f3*Df34 + 6*f3*f4*Df44 + 6*f3*f44*Df4 + 6*f3*f34*f4
             - 54*f3*f24 + 9*f3*f33 + 4*f44*f4**2*Df4 + 6*f34*f4*Df4 + 18*f24*Df4
             + 27*f2*f34 - 2*f34*f4**3 - 30*f4**2*f24 + 18*f4*f44*f2 + 4*f4**3*Df44
             + 12*f4**2*Df34 - 3*f4**2*f33 + 9*f4*Df33 + 18*f4*Df24 - 45*f4*f23
             - 81*f22 + 27*Df23) / 27
    L[19] = (-2*f4**3 - 9*f4*f3 - 27*f2 + 9*DDf4) / 9
    L[20] = (-2*f4**4 - 12*f4**2*f3 - 6*f4**2*Df4 + 18*f4*DDf4 - 27*f4*Df3
             - 18*f3**2 + 9*f3*Df4 - 81*Df2 + 27*DDf3) / 27
    return L


def gamma_formulas(l):
    """gamma_4 .. gamma_16 from lambda values (keys 4..20)."""
    l4, l5, l6, l7, l8, l9, l10, l11, l12, l13 = (l[i] for i in range(4, 14))
    l14, l15, l16, l17, l18, l19 = (l[i] for i in range(14, 20))
    g = {}
    g[4] = l4
    g[5] = l6
    g[6] = -(2*l4**2*l7 + 3*l7**2 - 3*l6*l8) / (3*l6)
    g[7] = -(2*l4**3*l7 + 3*l7**2*l4 - 3*l6**2*l5 - 6*l6*l4*l9) / (6*l6*l4)
    g[8] = (2*l6*l4*l5 + 6*l6*l10 - 6*l7*l9 + 3*l7*l8) / (6*l6)
    g[9] = (4*l6*l4**3*l7*l5 + 6*l4**2*l6**2*l11 + 12*l4**2*l6*l7*l10 - 6*l4**2*l7**2*l9
            + 3*l4**2*l7**2*l8 + 3*l6**2*l4*l5*l8 - 12*l6**2*l4*l5*l9
            + 3*l6*l4*l5*l7**2 - 3*l6**3*l5**2) / (6*l6**2*l4**2)
    g[10] = (3*l5 + l4*l12) / l4
    g[11] = l14
    g[12] = -(l14*l7 + l6*l5 - l6*l15) / l6
    g[13] = -(-3*l16*l6**2 + 6*l6*l7*l15 + 2*l6*l7*l4*l12 - 3*l14*l7**2) / (3*l6**2)
    g[14] = (2*l4*l6**2*l17 + 2*l4*l6*l7*l5 - 2*l4*l6*l7*l15 + l4*l14*l7**2
             + l6**2*l5*l14) / (2*l6**2*l4)
    g[15] = (2*l6**3*l4*l5*l12 + 6*l6**3*l4*l18 + 3*l6**3*l5**2 + 3*l6**3*l5*l15
             - 6*l7*l6**2*l4*l17 - 6*l7*l6**2*l4*l16 - 3*l7*l6**2*l5*l14
             - 3*l6*l4*l5*l7**2 + 9*l7**2*l4*l6*l15 + 2*l7**2*l4**2*l6*l12
             - 3*l14*l7**3*l4) / (6*l4*l6**3)
    g[16] = -3*l13 + l19
    return g


def alpha_formulas(l, x):
    """alpha_1 .. alpha_17; x is the value of the independent variable."""
    l4 = l[4]
    a = {1: x, 2: l[5] / l4}
    for k in range(3, 9):
        a[k] = l[k + 3] / l4**2
    a[9], a[10] = l[12], l[13]
    for k in range(11, 16):
        a[k] = l[k + 3] / l4
    a[16], a[17] = l[19], l[20]
    return a


# (gamma index, power of gamma_5, power of gamma_4 in the denominator)
BETA_SHAPE = {
    1: (6, 1, 4), 2: (7, 1, 4), 3: (8, 2, 6), 4: (9, 3, 8), 5: (10, 2, 4),
    6: (11, 1, 3), 7: (12, 2, 5), 8: (13, 3, 7), 9: (14, 3, 7), 10: (15, 4, 9),
    11: (16, 3, 6),
}


def beta_formulas(g):
    """beta_1 .. beta_11 from gamma values (keys 4..16)."""
    g4, g5 = g[4], g[5]
    return {k: g[i] * g5**a / g4**b for k, (i, a, b) in BETA_SHAPE.items()}


# ---------------------------------------------------------------------------
# invariant sets

class InvariantSet:
    """Named rational-function invariants of one ODE."""

    kind = ""
    symbol = ""

    def __init__(self, ode, fracs, preconditions=()):
        self.ode = ode
        self._fracs = dict(fracs)
        self._exprs = {}
        self.preconditions = list(preconditions)

    @property
    def indices(self):
        return sorted(self._fracs)

    def name(self, i):
        return f"{self.symbol}{i}"

    def frac(self, i):
        return self._fracs[i]

    def __getitem__(self, i):
        got = self._exprs.get(i)
        if got is None:
            got = self._fracs[i].to_expr()
            self._exprs[i] = got
        return got

    def __len__(self):
        return len(self._fracs)

    def __iter__(self):
        return iter(self.indices)

    def items(self):
        return [(i, self[i]) for i in self.indices]

    def as_dict(self):
        return {self.name(i): self[i] for i in self.indices}

    def __repr__(self):
        return f"<{type(self).__name__} of {self.ode!s}>"


class LambdaSet(InvariantSet):
    kind = "lambda"
    symbol = "lambda"


class GammaSet(InvariantSet):
    kind = "gamma"
    symbol = "gamma"


class AlphaSet(InvariantSet):
    kind = "alpha"
    symbol = "alpha"


class BetaSet(InvariantSet):
    kind = "beta"
    symbol = "beta"


def _require_nonzero(F, what, precondition, policy):
    dec = equals_zero(F, policy)
    if dec.outcome is Outcome.YES:
        raise OutOfClass(precondition, f"{what} vanishes identically ({precondition} fails)")


def lambda_invariants(t) -> LambdaSet:
    fr = lambda_formulas({n: t.frac(n) for n in ENTRY_NAMES})
    return LambdaSet(t.ode, fr)


def gamma_invariants(l: LambdaSet, policy=Policy()) -> GammaSet:
    _require_nonzero(l.frac(4), "f44", "f44 != 0", policy)
    _require_nonzero(l.frac(6), "f444", "f444 != 0", policy)
    return GammaSet(l.ode, gamma_formulas(l._fracs), ["f44 != 0", "f444 != 0"])


def alpha_invariants(l: LambdaSet, policy=Policy()) -> AlphaSet:
    _require_nonzero(l.frac(4), "f44", "f44 != 0", policy)
    x = l.frac(4).field.symbol("x")
    return AlphaSet(l.ode, alpha_formulas(l._fracs, x), ["f44 != 0"])


def beta_invariants(g: GammaSet, policy=Policy()) -> BetaSet:
    _require_nonzero(g.frac(4), "gamma4", "gamma4 = f44 != 0", policy)
    _require_nonzero(g.frac(5), "gamma5", "gamma5 = f444 != 0", policy)
    return BetaSet(g.ode, beta_formulas(g._fracs), ["f44 != 0", "f444 != 0"])


def _as_ode(ode):
    return ode if isinstance(ode, OdeSpec) else OdeSpec(ode)


def betas(ode, policy=Policy()) -> BetaSet:
    ode = _as_ode(ode)
    cached = getattr(ode, "_betas", None)
    if cached is None:
        l = lambda_invariants(ode.table())
        cached = beta_invariants(gamma_invariants(l, policy), policy)
        ode._betas = cached
    return cached


def alphas(ode, policy=Policy()) -> AlphaSet:
    ode = _as_ode(ode)
    cached = getattr(ode, "_alphas", None)
    if cached is None:
        cached = alpha_invariants(lambda_invariants(ode.table()), policy)
        ode._alphas = cached
    return cached


# ---------------------------------------------------------------------------
# pointwise evaluation

def table_values(ode: OdeSpec, point, prec=50):
    """Table entries at a jet point (plus parameter values); Fraction or mpf."""
    t = ode.table()
    vals = ode.field.gen_values(point, prec)
    return {n: t.frac(n).evaluate(point, prec, vals) for n in ENTRY_NAMES}


def beta_from_table(tv, prec=50):
    """beta_1..beta_11 from table values at one point.

    Raises ZeroDivisionError when gamma_4 or gamma_5 vanishes there.
    """
    with mpmath.workdps(prec + 10):
        g = gamma_formulas(lambda_formulas(tv))
        if g[4] == 0 or g[5] == 0:
            raise ZeroDivisionError("gamma4 or gamma5 vanishes at the point")
        return beta_formulas(g)


def alpha_from_table(tv, x, prec=50):
    with mpmath.workdps(prec + 10):
        l = lambda_formulas(tv)
        if l[4] == 0:
            raise ZeroDivisionError("lambda4 vanishes at the point")
        return alpha_formulas(l, x)


def beta_values(ode: OdeSpec, point, prec=50):
    """beta_1..beta_11 of ode at a point, via its symbolic table."""
    return beta_from_table(table_values(ode, point, prec), prec)


def alpha_values(ode: OdeSpec, point, prec=50):
    x = point["x"]
    return alpha_from_table(table_values(ode, point, prec), Fraction(x) if isinstance(x, (int, str)) else x, prec)


# ---------------------------------------------------------------------------
# constancy

class Constancy(enum.Enum):
    CONSTANT = "constant"
    NON_CONSTANT = "non-constant"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


@dataclass
class ConstancyEntry:
    name: str
    status: Constancy
    value: object = None        # Expr in the parameters when constant
    method: str = ""
    witness: dict | None = None

    @property
    def is_constant(self):
        return self.status is Constancy.CONSTANT


@dataclass
class ConstancyReport:
    kind: str
    entries: dict = field(default_factory=dict)
    seed: int = 0

    def __getitem__(self, name):
        return self.entries[name]

    def constants(self):
        return {n: e.value for n, e in self.entries.items() if e.is_constant}

    def non_constant(self):
        return [n for n, e in self.entries.items() if e.status is Constancy.NON_CONSTANT]

    def all_constant(self):
        return all(e.is_constant for e in self.entries.values())


def _valid_candidate_point(inv: InvariantSet, i, policy):
    """Lexicographically first sample point where invariant i is finite."""
    F = inv.frac(i)
    names = set(E.VARIABLES) | set(inv.ode.parameters)
    pts = sample_points(names, 4 * policy.points, policy.seed)
    pts.sort(key=lambda pt: tuple(pt[v] for v in E.VARIABLES))
    for pt in pts:
        try:
            F.evaluate(pt, policy.precision)
        except (EvaluationError, ZeroDivisionError):
            continue
        return pt
    return None


def classify_constancy(s: InvariantSet, ode: OdeSpec = None, policy=Policy()) -> ConstancyReport:
    """Classify every member of s as constant, non-constant or unknown.

    The candidate constant is the invariant with only x, y, p, q replaced by
    the coordinates of the first valid sample point, so parameters stay
    symbolic; the decision is equals_zero(invariant - candidate).
    """
    rep = ConstancyReport(s.kind, seed=policy.seed)
    for i in s.indices:
        name = s.name(i)
        F = s.frac(i)
        if F.is_zero():
            rep.entries[name] = ConstancyEntry(name, Constancy.CONSTANT, E.ZERO, "symbolic")
            continue
        if all(F.diff(v).is_zero() for v in E.VARIABLES):
            rep.entries[name] = ConstancyEntry(name, Constancy.CONSTANT, F.to_expr(), "symbolic")
            continue
        pt = _valid_candidate_point(s, i, policy)
        if pt is None:
            rep.entries[name] = ConstancyEntry(name, Constancy.UNKNOWN, method="no valid point")
            continue
        bind = {v: E.Const(pt[v]) for v in E.VARIABLES}
        try:
            cand = simplify(replace(s[i], bind))
        except (EvaluationError, ZeroDivisionError):
            rep.entries[name] = ConstancyEntry(name, Constancy.UNKNOWN, method="candidate failed")
            continue
        dec = equals_zero(E.sub(s[i], cand), policy)
        if dec.outcome is Outcome.YES:
            rep.entries[name] = ConstancyEntry(name, Constancy.CONSTANT, cand, dec.method)
        elif dec.outcome is Outcome.NO:
            rep.entries[name] = ConstancyEntry(name, Constancy.NON_CONSTANT, None, dec.method,
                                               dec.witness)
        else:
            rep.entries[name] = ConstancyEntry(name, Constancy.UNKNOWN, None, dec.method)
    return rep
