"""Invariant differentiation operators D1..D4.

Each operator is K d/dx + L d/dy + M d/dp + N d/dq with coefficients built
from the derivative table.  Once f is fixed an invariant is an ordinary
function of (x, y, p, q), so applying an operator is plain differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .jet import JET_VARS, OdeSpec
from .kernel import Policy
from .kernel import expr as E
from .kernel.ratfunc import field_for, merge_fields
from .invariants import OutOfClass, _require_nonzero

POINT = "point-subgroup"
FIBER = "fiber-preserving"
GROUPS = (POINT, FIBER)


def point_coefficients(t, i):
    """(K, L, M, N) for the operators of the x-fixing subgroup."""
    f, f3, f4, f44 = t["f"], t["f3"], t["f4"], t["f44"]
    one, zero = f44 / f44, f44 - f44
    p, q = (f44.field.symbol(v) for v in ("p", "q"))
    if i == 1:
        return zero, zero, zero, 1 / f44
    if i == 2:
        return zero, zero, 3 / f44, 2 * f4 / f44
    if i == 3:
        return zero, 9 / f44, 3 * f4 / f44, (2 * f4**2 + 3 * f3) / f44
    if i == 4:
        return one, p, q, f
    raise ValueError("operator index must be 1..4")


def fiber_coefficients(t, i):
    """(K, L, M, N) for the fiber-preserving operators."""
    f, f4 = t["f"], t["f4"]
    f24, f33, f34, f44 = t["f24"], t["f33"], t["f34"], t["f44"]
    f344, f444 = t["f344"], t["f444"]
    zero = f44 - f44
    p, q = (f44.field.symbol(v) for v in ("p", "q"))
    if i == 1:
        return zero, zero, zero, f44 / f444
    if i == 2:
        return zero, zero, 1 / f44, -f344 / (f44 * f444)
    if i == 3:
        c = 1 / (f44**4 * f444)
        return (zero,
                c * 6 * f44 * f444**2,
                c * (-2 * f44 * f444 * (f4 * f444 + 3 * f344)),
                c * (3 * f44 * f344**2 + f444**2 * (3 * f33 + 2 * f34 * f4 - 6 * f24)))
    if i == 4:
        s = f444 / f44**2
        return s, s * p, s * q, s * f
    raise ValueError("operator index must be 1..4")


@dataclass
class InvOperator:
    group: str
    index: int
    ode: OdeSpec
    K: object
    L: object
    M: object
    N: object

    @property
    def coefficients(self):
        return (self.K, self.L, self.M, self.N)

    def coefficient_exprs(self):
        return tuple(c.to_expr() for c in self.coefficients)

    def apply(self, J):
        return apply(self, J)

    def __str__(self):
        K, L, M, N = self.coefficient_exprs()
        return f"D{self.index}[{self.group}] = ({K})Dx + ({L})Dy + ({M})Dp + ({N})Dq"


def operator(group, index, ode, policy=Policy()) -> InvOperator:
    if not isinstance(ode, OdeSpec):
        ode = OdeSpec(ode)
    t = ode.table()
    tf = {n: t.frac(n) for n in ("f", "f3", "f4", "f24", "f33", "f34", "f44", "f344", "f444")}
    _require_nonzero(tf["f44"], "f44", "f44 != 0", policy)
    if group == POINT:
        coeffs = point_coefficients(tf, index)
    elif group == FIBER:
        _require_nonzero(tf["f444"], "f444", "f444 != 0", policy)
        coeffs = fiber_coefficients(tf, index)
    else:
        raise ValueError(f"unknown group {group!r}; expected one of {GROUPS}")
    return InvOperator(group, index, ode, *coeffs)


def operators(group, ode, policy=Policy()):
    return [operator(group, i, ode, policy) for i in range(1, 5)]


def apply_frac(op: InvOperator, J):
    """Apply op to a Frac J (lifted into a common field); returns a Frac."""
    field = merge_fields(op.K.field, J.field)
    J = J.lift(field)
    out = field.zero()
    for c, v in zip(op.coefficients, JET_VARS):
        if c.is_zero():
            continue
        d = J.diff(v)
        if not d.is_zero():
            out = out + c.lift(field) * d
    return out


def apply(op: InvOperator, J):
    """op applied to an invariant given as Expr (or string); returns an Expr."""
    if isinstance(J, str):
        from .kernel import parse
        J = parse(J)
    J = E.sympify(J)
    field = merge_fields(op.ode.field, field_for([J], JET_VARS))
    return apply_frac(op, field.convert(J)).to_expr()


__all__ = ["FIBER", "GROUPS", "InvOperator", "OutOfClass", "POINT", "apply",
           "apply_frac", "fiber_coefficients", "operator", "operators",
           "point_coefficients"]
