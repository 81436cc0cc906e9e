"""Derivative tables of y''' = f(x, y, p, q).

Index convention for partials: 1 <-> x, 2 <-> y, 3 <-> p, 4 <-> q.  Partial
derivatives in x never appear in the table; they are replaced by the total
derivative columns d_{i,j}.
"""

from __future__ import annotations

from itertools import combinations_with_replacement

from .kernel import Expr, Frac, Policy, domain_constraints, equals_zero, parse
from .kernel import expr as E
from .kernel.ratfunc import field_for, merge_fields

JET_VARS = ("x", "y", "p", "q")
_VAR_OF = {1: "x", 2: "y", 3: "p", 4: "q"}

FIRST = ["f2", "f3", "f4"]
SECOND = ["f" + "".join(map(str, c)) for c in combinations_with_replacement((2, 3, 4), 2)]
THIRD = ["f" + "".join(map(str, c)) for c in combinations_with_replacement((2, 3, 4), 3)]
# entries whose total derivative forms d_{1,1} .. d_{1,10}
D1_SOURCES = ["f", "f2", "f3", "f4", "f22", "f23", "f24", "f33", "f34", "f44"]
D_COLUMNS = [f"d1_{k}" for k in range(1, 11)] + [f"d2_{k}" for k in range(1, 5)] + ["d3_1"]
# z5 .. z39 in order; z1..z4 are x, y, p, q and z40..z43 are K, L, M, N
Z_NAMES = ["f"] + FIRST + SECOND + THIRD + D_COLUMNS
ENTRY_NAMES = tuple(Z_NAMES)


class OdeSpec:
    """The equation y''' = f(x, y, p, q) with its parameters and domain."""

    def __init__(self, f, parameters=None, name=None):
        if isinstance(f, str):
            f = parse(f)
        self.f = E.sympify(f)
        params = self.f.parameters()
        if parameters is not None:
            extra = params - set(parameters)
            if extra:
                raise ValueError(f"undeclared symbols in f: {sorted(extra)}")
            params = set(parameters)
        self.parameters = frozenset(params)
        self.domain_constraints = domain_constraints(self.f)
        self.name = name
        self._field = None
        self._table = None

    @property
    def field(self):
        if self._field is None:
            self._field = field_for([self.f], JET_VARS)
        return self._field

    def with_field(self, field):
        """Same ODE, but computed inside a larger generator field."""
        o = OdeSpec(self.f, self.parameters, self.name)
        o._field = merge_fields(self.field, field)
        return o

    @property
    def frac(self) -> Frac:
        return self.field.convert(self.f)

    def table(self) -> "DerivTable":
        if self._table is None:
            self._table = DerivTable(self)
        return self._table

    def __str__(self):
        return f"y''' = {self.f}"

    def __repr__(self):
        return f"OdeSpec({str(self.f)!r})"


def total_derivative_frac(F: Frac, f: Frac) -> Frac:
    """D_x F = F_x + p F_y + q F_p + f F_q inside one field."""
    field = F.field
    out = F.diff("x")
    for v, coef in (("y", "p"), ("p", "q")):
        d = F.diff(v)
        if not d.is_zero():
            out = out + field.symbol(coef) * d
    d = F.diff("q")
    if not d.is_zero():
        out = out + f * d
    return out


def total_derivative(e, ode: OdeSpec) -> Expr:
    e = E.sympify(e)
    field = merge_fields(ode.field, field_for([e], JET_VARS))
    F = field.convert(e)
    return total_derivative_frac(F, field.convert(ode.f)).to_expr()


class DerivTable:
    """All partials of f up to order three plus the D_x columns."""

    def __init__(self, ode: OdeSpec):
        self.ode = ode
        self.field = ode.field
        f = ode.frac
        t = {"f": f}
        for name in FIRST:
            t[name] = f.diff(_VAR_OF[int(name[1])])
        for name in SECOND:
            t[name] = t[name[:2]].diff(_VAR_OF[int(name[2])])
        for name in THIRD:
            t[name] = t[name[:3]].diff(_VAR_OF[int(name[3])])
        D = lambda F: total_derivative_frac(F, f)
        for k, src in enumerate(D1_SOURCES, 1):
            t[f"d1_{k}"] = D(t[src])
        for k in range(1, 5):
            t[f"d2_{k}"] = D(t[f"d1_{k}"])
        t["d3_1"] = D(t["d2_1"])
        self._fracs = t
        self._exprs = {}

    def frac(self, name) -> Frac:
        return self._fracs[_canon_name(name)]

    def __getitem__(self, name) -> Expr:
        name = _canon_name(name)
        got = self._exprs.get(name)
        if got is None:
            got = self._fracs[name].to_expr()
            self._exprs[name] = got
        return got

    def partial(self, *indices) -> Expr:
        """f_{i,j,...} for indices in {2,3,4} given in any order."""
        return self["f" + "".join(str(i) for i in sorted(indices))]

    def z(self, k) -> Expr:
        if 1 <= k <= 4:
            return E.Sym(JET_VARS[k - 1])
        if 5 <= k <= 39:
            return self[Z_NAMES[k - 5]]
        raise IndexError("z index outside 1..39 (z40..z43 are operator unknowns)")

    def names(self):
        return list(ENTRY_NAMES)

    def items(self):
        return [(n, self[n]) for n in ENTRY_NAMES]

    def is_identically_zero(self, name, policy=Policy()):
        return equals_zero(self.frac(name), policy)


def _canon_name(name):
    if name in ("f",) or name.startswith("d"):
        return name
    if name.startswith("f") and name[1:].isdigit():
        return "f" + "".join(sorted(name[1:]))
    return name


def derivative_table(ode: OdeSpec) -> DerivTable:
    return ode.table()


def table_from_series(fs, point):
    """Table values at a point from an order-3 series fs of f around it.

    Partials come straight from the series; the D_x columns are formed by
    series arithmetic, each application costing one order.
    """
    from .kernel.series import Series
    P = Series.variable(2, fs_value(point["p"]), fs.order)
    Q = Series.variable(3, fs_value(point["q"]), fs.order)

    def D(F):
        return F.diff(0) + P * F.diff(1) + Q * F.diff(2) + fs * F.diff(3)

    s = {"f": fs}
    for name in FIRST:
        s[name] = fs.diff(int(name[1]) - 1)
    for name in SECOND:
        s[name] = s[name[:2]].diff(int(name[2]) - 1)
    for name in THIRD:
        s[name] = s[name[:3]].diff(int(name[3]) - 1)
    for k, src in enumerate(D1_SOURCES, 1):
        s[f"d1_{k}"] = D(s[src])
    for k in range(1, 5):
        s[f"d2_{k}"] = D(s[f"d1_{k}"])
    s["d3_1"] = D(s["d2_1"])
    return {n: s[n].value for n in ENTRY_NAMES}


def fs_value(v):
    from fractions import Fraction
    return Fraction(v) if isinstance(v, (int, str)) else v


def table_values_series(ode: OdeSpec, point, prec=50):
    """Second route to the table values: expand f itself as a series."""
    import mpmath
    from .kernel.series import jet_series
    fs = jet_series(ode.f, point, prec=prec)
    with mpmath.workdps(prec + 10):
        return table_from_series(fs, point)
