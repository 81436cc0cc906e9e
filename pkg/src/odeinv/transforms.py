"""Fiber-preserving changes of variables and the randomized invariance harness.

A transform t is x_bar = phi(x), y_bar = psi(x, y).  ``pushforward_ode(ode, t)``
reads ``ode`` as an equation in the barred variables and substitutes the
transform into it, producing the equation satisfied by y(x).  This is the
direction used by every worked example (the barred equation is the known one).
``transport_ode`` goes the other way and needs the inverse transform.

The invariance statement sampled by ``invariance_check`` reads

    beta[pushforward_ode(ode, t)](pt) == beta[ode](pushforward_point(pt, t))
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .jet import JET_VARS, OdeSpec
from .kernel import Outcome, Policy, equals_zero, parse, sample_points
from .kernel import expr as E
from .kernel.evaluate import DEFAULT_PRECISION, EvaluationError, evaluate
from .kernel.ops import differentiate, replace, simplify
from .kernel.ratfunc import _KIND_SYM, Frac, to_frac


class DegenerateTransform(ValueError):
    pass


class NotInvertible(ValueError):
    pass


def _expr(e):
    return parse(e) if isinstance(e, str) else E.sympify(e)


def _D(e):
    """Total derivative along y(x) without the y''' term: d_x + p d_y + q d_p."""
    return E.add(differentiate(e, "x"),
                 E.mul(E.P, differentiate(e, "y")),
                 E.mul(E.Q, differentiate(e, "p")))


class FiberTransform:
    """x_bar = phi(x), y_bar = psi(x, y)."""

    def __init__(self, phi, psi, inverse=None, check=True):
        self.phi = simplify(_expr(phi))
        self.psi = simplify(_expr(psi))
        if check:
            if self.phi.free_variables() - {"x"}:
                raise DegenerateTransform(f"phi must depend on x only: {self.phi}")
            if self.psi.free_variables() - {"x", "y"}:
                raise DegenerateTransform(f"psi must depend on x, y only: {self.psi}")
        self.phi_x = differentiate(self.phi, "x")
        self.psi_y = differentiate(self.psi, "y")
        if check:
            if equals_zero(self.phi_x).outcome is Outcome.YES:
                raise DegenerateTransform("phi' vanishes identically")
            if equals_zero(self.psi_y).outcome is Outcome.YES:
                raise DegenerateTransform("psi_y vanishes identically")
        self.nondegeneracy = [f"{self.phi_x} != 0", f"{self.psi_y} != 0"]
        self._inverse = inverse
        self._jet = None

    # chain rule -----------------------------------------------------------
    def jet_exprs(self):
        """(x_bar, y_bar, p_bar, q_bar, G, H) with r_bar = (G + H*r)/phi'.

        r is y''' of the unbarred curve; H = d q_bar / d q.
        """
        if self._jet is None:
            phi1 = self.phi_x
            pb = simplify(E.div(_D(self.psi), phi1))
            qb = simplify(E.div(_D(pb), phi1))
            G = simplify(_D(qb))
            H = simplify(differentiate(qb, "q"))
            self._jet = (self.phi, self.psi, pb, qb, G, H)
        return self._jet

    def point_map(self):
        return self.jet_exprs()[:4]

    # algebra -------------------------------------------------------------
    def compose(self, inner: "FiberTransform") -> "FiberTransform":
        """self after inner: x -> phi(phi_in(x)), psi(phi_in(x), psi_in(x, y))."""
        b = {"x": inner.phi, "y": inner.psi}
        return FiberTransform(replace(self.phi, {"x": inner.phi}), replace(self.psi, b))

    __matmul__ = compose

    def inverse(self) -> "FiberTransform":
        if isinstance(self._inverse, FiberTransform):
            return self._inverse
        if self._inverse is not None:
            phi_inv, psi_inv = self._inverse
            inv = FiberTransform(phi_inv, psi_inv) if psi_inv is not None else None
            if inv is None:
                inv = FiberTransform(phi_inv, self._invert_psi(_expr(phi_inv)))
        else:
            phi_inv = self._invert_phi()
            inv = FiberTransform(phi_inv, self._invert_psi(phi_inv))
        inv._inverse = self
        self._inverse = inv
        return inv

    def _invert_phi(self):
        """Inverse of a Moebius phi = (a x + b)/(c x + d)."""
        F = to_frac(self.phi)
        fld = F.field
        xi = fld.sym_index.get("x")
        if xi is None or any(g.kind != _KIND_SYM for g in fld.gens) or \
                F.num.degrees()[xi] > 1 or F.den.degrees()[xi] > 1:
            raise NotInvertible(f"cannot invert phi = {self.phi}; supply an inverse")
        num, den = _poly_expr(fld, F.num), _poly_expr(fld, F.den)
        a, b = differentiate(num, "x"), replace(num, {"x": 0})
        c, d = differentiate(den, "x"), replace(den, {"x": 0})
        X = E.X
        return simplify(E.div(E.sub(E.mul(d, X), b), E.sub(a, E.mul(c, X))))

    def _invert_psi(self, phi_inv):
        if equals_zero(differentiate(self.psi_y, "y")).outcome is not Outcome.YES:
            raise NotInvertible(f"psi = {self.psi} is not linear in y; supply an inverse")
        a = self.psi_y
        b = simplify(E.sub(self.psi, E.mul(a, E.Y)))
        at = {"x": phi_inv}
        return simplify(E.div(E.sub(E.Y, replace(b, at)), replace(a, at)))

    def verify_inverse(self, inv: "FiberTransform" = None, policy=Policy()):
        """Check phi(phi_inv(x)) = x and psi(phi_inv, psi_inv) = y."""
        inv = inv or self.inverse()
        c1 = E.sub(replace(self.phi, {"x": inv.phi}), E.X)
        c2 = E.sub(replace(self.psi, {"x": inv.phi, "y": inv.psi}), E.Y)
        return equals_zero(c1, policy), equals_zero(c2, policy)

    def is_identity(self):
        return self.phi is E.X and self.psi is E.Y

    def __str__(self):
        return f"x_bar = {self.phi}, y_bar = {self.psi}"

    def __repr__(self):
        return f"FiberTransform({str(self.phi)!r}, {str(self.psi)!r})"


def _poly_expr(fld, poly):
    return Frac(fld, poly, fld.one().den, False).to_expr()


def identity():
    return FiberTransform("x", "y")


# ---------------------------------------------------------------------------
# ODE maps

def pushforward_ode(ode, t: FiberTransform) -> OdeSpec:
    """Substitute t into the barred equation ``ode``; result is y''' = f(x,y,p,q)."""
    ode = ode if isinstance(ode, OdeSpec) else OdeSpec(ode)
    xb, yb, pb, qb, G, H = t.jet_exprs()
    Fb = replace(ode.f, {"x": xb, "y": yb, "p": pb, "q": qb})
    f = simplify(E.div(E.sub(E.mul(t.phi_x, Fb), G), H))
    return OdeSpec(f, ode.parameters | f.parameters(), name=None)


def transport_ode(ode, t: FiberTransform) -> OdeSpec:
    """The image of ``ode`` (in x, y) written in the barred variables."""
    return pushforward_ode(ode, t.inverse())


def pushforward_point(pt, t: FiberTransform, params=None, prec=DEFAULT_PRECISION):
    """Barred coordinates (x_bar, y_bar, p_bar, q_bar) of a jet point."""
    a = dict(params or {})
    a.update({v: pt[v] for v in JET_VARS})
    out = {}
    for v, e in zip(JET_VARS, t.point_map()):
        out[v] = evaluate(e, a, prec)
    if params:
        out.update(params)
    return out


# ---------------------------------------------------------------------------
# random transforms

def _rand_coeff(rng, lo=-2, hi=2, dens=(1, 2, 3)):
    d = rng.choice(dens)
    return Fraction(rng.randint(lo * d, hi * d), d)


def _poly(coeffs, v):
    return E.add(*(E.mul(E.Const(c), E.power(v, k)) for k, c in enumerate(coeffs) if c))


def _min_on_box(e, names):
    """Minimum of e over a 9-point grid per axis of [1, 3]."""
    lo = None
    grid = [Fraction(1) + Fraction(2 * k, 8) for k in range(9)]
    if names == ("x",):
        pts = [{"x": g} for g in grid]
    else:
        pts = [{"x": a, "y": b} for a in grid for b in grid]
    for pt in pts:
        v = evaluate(e, pt)
        lo = v if lo is None else min(lo, v)
    return lo


def random_fiber_transform(seed, degree_bound=2, quadratic=True) -> FiberTransform:
    """Deterministic random fiber-preserving transform.

    phi is a polynomial in x of degree <= degree_bound with phi' >= 1/4 on
    [1, 3]; psi = c(x) y + e(x) (+ k y^2) with psi_y >= 1/4 on [1, 3]^2.
    degree_bound == 1 gives the affine family x_bar = a x + b, y_bar = c y + d x + e.
    """
    if degree_bound < 1:
        raise ValueError("degree_bound must be >= 1")
    rng = random.Random(f"fiber-transform:{seed}:{degree_bound}")
    X, Y = E.X, E.Y
    while True:
        pc = [_rand_coeff(rng) for _ in range(degree_bound + 1)]
        if degree_bound == 1:
            cc = [_rand_coeff(rng)]
            ec = [_rand_coeff(rng) for _ in range(2)]
            k = Fraction(0)
        else:
            cc = [_rand_coeff(rng) for _ in range(degree_bound)]
            ec = [_rand_coeff(rng) for _ in range(degree_bound + 1)]
            k = _rand_coeff(rng, 0, 1, (2, 3, 4)) if quadratic else Fraction(0)
        phi = _poly(pc, X)
        c = _poly(cc, X)
        psi = E.add(E.mul(c, Y), _poly(ec, X), E.mul(E.Const(k), E.power(Y, 2)))
        if phi is E.ZERO or c is E.ZERO:
            continue
        phi1 = differentiate(phi, "x")
        psiy = differentiate(psi, "y")
        if phi1.free_variables():
            m1 = _min_on_box(phi1, ("x",))
        else:
            m1 = evaluate(phi1, {})
        m2 = _min_on_box(psiy, ("x", "y")) if psiy.free_variables() else evaluate(psiy, {})
        if m1 >= Fraction(1, 4) and m2 >= Fraction(1, 4):
            return FiberTransform(phi, psi)


# ---------------------------------------------------------------------------
# invariance harness

@dataclass
class InvarianceEntry:
    name: str
    passed: bool = True
    max_error: object = 0
    witness: dict | None = None
    detail: str = ""


@dataclass
class InvarianceReport:
    ode: str
    transform: str
    kind: str
    points: int = 0
    exact: bool = True
    entries: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.points > 0 and all(e.passed for e in self.entries.values())

    def failures(self):
        return [e for e in self.entries.values() if not e.passed]


class NoValidPoints(RuntimeError):
    pass


def _as_mpf(v):
    return mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else mpmath.mpf(v)


def _rel_err(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return abs(a - b) / max(1, abs(b))
    with mpmath.workdps(60):
        a, b = _as_mpf(a), _as_mpf(b)
        return abs(a - b) / max(1, abs(b))


def pushforward_series(ode, t: FiberTransform, pt, params=None, prec=DEFAULT_PRECISION):
    """Order-3 series at pt of the f of pushforward_ode(ode, t).

    Built by composing series of phi, psi, p_bar, q_bar with the barred f,
    so the (possibly large) transformed equation is never expanded.
    """
    from .kernel.series import jet_series
    a = dict(params or {})
    a.update({v: pt[v] for v in JET_VARS})
    xb, yb, pb, qb, G, H = t.jet_exprs()
    S = {name: jet_series(e, a, prec=prec) for name, e in
         (("x", xb), ("y", yb), ("p", pb), ("q", qb), ("G", G), ("H", H), ("d", t.phi_x))}
    with mpmath.workdps(prec + 10):
        Fb = jet_series(ode.f, dict(params or {}), prec=prec,
                        bindings={v: S[v] for v in JET_VARS})
        return (S["d"] * Fb - S["G"]) / S["H"]


def transformed_table_values(ode, t, pt, params=None, prec=DEFAULT_PRECISION):
    from .jet import table_from_series
    fs = pushforward_series(ode, t, pt, params, prec)
    with mpmath.workdps(prec + 10):
        return table_from_series(fs, pt)


def invariance_check(ode, t: FiberTransform, n_points=50, tolerance=1e-25, kind="beta",
                     seed=0, params=None, budget_factor=20, prec=DEFAULT_PRECISION,
                     route="series"):
    """Sample beta (or alpha) of ode and of its transform at related points.

    With x_bar = phi(x), y_bar = psi(x, y) the transformed equation is
    pushforward_ode(ode, t) in the unbarred variables; each invariant I must
    satisfy I[transformed](pt) == I[ode](pushforward_point(pt, t)).

    The original side always uses the symbolic derivative table.  The
    transformed side uses series composition (route="series", default) or the
    symbolic table of pushforward_ode (route="symbolic", slow for big f).
    Parameters get the values in ``params`` (default: sampled once).
    """
    from .invariants import (alpha_from_table, beta_from_table, table_values)

    ode = ode if isinstance(ode, OdeSpec) else OdeSpec(ode)
    if kind == "alpha" and equals_zero(E.sub(t.phi, E.X)).outcome is not Outcome.YES:
        raise ValueError("alpha invariance is only claimed for phi = identity")
    if kind == "beta":
        values = lambda tv, pt: beta_from_table(tv, prec)
    else:
        values = lambda tv, pt: alpha_from_table(tv, pt["x"], prec)
    other = pushforward_ode(ode, t) if route == "symbolic" else None
    pnames = sorted(ode.parameters)
    if params is None:
        params = sample_points(pnames, 1, seed + 7919)[0] if pnames else {}
    rep = InvarianceReport(str(ode.f), str(t), kind)
    for pt in sample_points(JET_VARS, budget_factor * n_points, seed):
        if rep.points >= n_points:
            break
        full = dict(pt)
        full.update(params)
        try:
            if other is None:
                tv = transformed_table_values(ode, t, pt, params, prec)
            else:
                tv = table_values(other, full, prec)
            lhs = values(tv, pt)
            bar = pushforward_point(pt, t, params, prec)
            rhs = values(table_values(ode, bar, prec), bar)
        except (EvaluationError, ZeroDivisionError, ValueError):
            continue
        rep.points += 1
        for i, a in lhs.items():
            b = rhs[i]
            name = f"{kind}{i}"
            ent = rep.entries.setdefault(name, InvarianceEntry(name))
            if isinstance(a, Fraction) and isinstance(b, Fraction):
                ok = a == b
                err = abs(a - b)
            else:
                rep.exact = False
                err = _rel_err(a, b)
                ok = err <= tolerance
            if _as_mpf(err) > _as_mpf(ent.max_error):
                ent.max_error = err
            if not ok and ent.passed:
                ent.passed = False
                ent.witness = full
                ent.detail = f"{a} != {b}"
    if rep.points == 0:
        raise NoValidPoints(f"no valid jet points for {ode} under {t}")
    return rep
