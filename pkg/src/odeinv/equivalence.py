"""Invariant signatures and necessary conditions for fiber-preserving equivalence.

Nothing here ever concludes that two equations are equivalent: the beta
invariants give necessary conditions only, so the possible verdicts are
"not equivalent" (with a concrete witness) and "inconclusive".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import flint
import mpmath
import numpy as np

from .invariants import (BETA_RANGE, Constancy, OutOfClass, betas,
                         classify_constancy)
from .jet import OdeSpec
from .kernel import Outcome, Policy, equals_zero, parse, sample_points
from .kernel import expr as E
from .kernel.ops import frac_equals_zero, point_values, replace, simplify

BETA_NAMES = tuple(f"beta{k}" for k in BETA_RANGE)
NULLSPACE_TOLERANCE = 1e-10


class SamplingError(RuntimeError):
    """Not enough valid sample points to discover relations."""


class DegeneratePilot(ValueError):
    """A pilot invariant cannot be solved for its auxiliary symbol."""


def _as_ode(ode):
    return ode if isinstance(ode, OdeSpec) else OdeSpec(ode)


# ---------------------------------------------------------------------------
# relations

@dataclass(frozen=True)
class Relation:
    """sum c * prod beta_k^e = 0 with exact rational coefficients.

    ``terms`` maps monomials (tuples of (k, e) pairs, k a beta index) to
    coefficients; the empty monomial is the constant term.
    """

    terms: tuple

    @classmethod
    def from_dict(cls, d):
        items = sorted(((m, Fraction(c)) for m, c in d.items() if c),
                       key=lambda mc: (-sum(e for _, e in mc[0]), mc[0]))
        return cls(tuple(items))

    @classmethod
    def parse(cls, text):
        """Relation from an expression in beta1..beta11, e.g. '3*beta5 - 2*beta6 + 5/9'."""
        from .lie.poly import Poly
        P = Poly.parse(BETA_NAMES, text)
        return cls.from_dict({tuple((i + 1, e) for i, e in m): c for m, c in P.terms.items()})

    @property
    def degree(self):
        return max((sum(e for _, e in m) for m, _ in self.terms), default=0)

    def indices(self):
        return sorted({k for m, _ in self.terms for k, _ in m})

    def vector(self, monomials):
        d = dict(self.terms)
        return [d.get(m, Fraction(0)) for m in monomials]

    def evaluate_frac(self, beta_fracs):
        """The relation with beta_k replaced by beta_fracs[k] (Fracs of one field)."""
        out = None
        for m, c in self.terms:
            t = None
            for k, e in m:
                f = beta_fracs[k] ** e
                t = f if t is None else t * f
            if t is None:
                t = next(iter(beta_fracs.values())).field.const(c)
            else:
                t = t * c
            out = t if out is None else out + t
        return out

    def __str__(self):
        parts = []
        for m, c in self.terms:
            mono = "*".join(f"beta{k}" + (f"^{e}" if e > 1 else "") for k, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return (" + ".join(parts).replace("+ -", "- ") or "0") + " = 0"


def _monomials(indices, degree):
    out = [()]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(indices, d):
            m = {}
            for k in combo:
                m[k] = m.get(k, 0) + 1
            out.append(tuple(sorted(m.items())))
    # high degree first so that row reduction solves for the top monomials
    out.sort(key=lambda m: (-sum(e for _, e in m), m))
    return out


def _row_value(m, vals):
    v = 1
    for k, e in m:
        v = v * vals[k] ** e
    return v


def _exact_nullspace(rows):
    M = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in r] for r in rows])
    R, rank = M.rref()
    ncols = M.ncols()
    pivots, r = [], 0
    for c in range(ncols):
        if r < rank and R[r, c] != 0:
            pivots.append(c)
            r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            x = -R[i, fc]
            v[pc] = Fraction(int(x.p), int(x.q))
        basis.append(v)
    return _reduce_basis(basis, ncols)


def _reduce_basis(basis, ncols):
    """Row-reduce a nullspace basis so each vector has a distinct leading entry."""
    if not basis:
        return []
    M = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in v] for v in basis])
    R, rank = M.rref()
    out = []
    for i in range(rank):
        out.append([Fraction(int(R[i, c].p), int(R[i, c].q)) for c in range(ncols)])
    return out


def _numeric_nullspace(rows, tol=NULLSPACE_TOLERANCE, max_den=10**6):
    A = np.array([[float(x) for x in r] for r in rows])
    scale = np.max(np.abs(A), axis=0)
    scale[scale == 0] = 1.0
    _, sv, vt = np.linalg.svd(A / scale, full_matrices=True)
    smax = sv[0] if len(sv) else 1.0
    rank = int(np.sum(sv > tol * smax))
    null = vt[rank:] / scale
    if not len(null):
        return []
    # reduced echelon form in floats, then rationalize
    N = null.copy()
    r = 0
    for c in range(N.shape[1]):
        if r >= N.shape[0]:
            break
        piv = r + int(np.argmax(np.abs(N[r:, c])))
        if abs(N[piv, c]) < tol:
            continue
        N[[r, piv]] = N[[piv, r]]
        N[r] /= N[r, c]
        for i in range(N.shape[0]):
            if i != r:
                N[i] -= N[i, c] * N[r]
        r += 1
    out = []
    for v in N[:r]:
        out.append([Fraction(float(x)).limit_denominator(max_den) if abs(x) > tol else Fraction(0) for x in v])
    return out


# ---------------------------------------------------------------------------
# signatures

@dataclass
class InvariantSignature:
    ode: OdeSpec
    f44_zero: Outcome
    f444_zero: Outcome
    constancy: object = None          # ConstancyReport, None when out of class
    relations: list = field(default_factory=list)
    degree_bound: int = 2
    rejected: list = field(default_factory=list)   # numeric candidates not confirmed

    @property
    def in_class(self):
        return self.f44_zero is Outcome.NO and self.f444_zero is Outcome.NO

    @property
    def class_flags(self):
        return (self.f44_zero, self.f444_zero)

    @property
    def betas(self):
        return betas(self.ode) if self.in_class else None

    def constants(self):
        """{k: constant value} for the betas classified as constant."""
        if self.constancy is None:
            return {}
        return {k: self.constancy[f"beta{k}"].value for k in BETA_RANGE
                if self.constancy[f"beta{k}"].is_constant}

    def status(self, k):
        return self.constancy[f"beta{k}"].status

    def non_constant(self):
        if self.constancy is None:
            return []
        return [k for k in BETA_RANGE if self.status(k) is not Constancy.CONSTANT]

    def implies(self, relation, policy=Policy()):
        """Whether a relation (Relation or text) holds on this signature's betas."""
        if isinstance(relation, str):
            relation = Relation.parse(relation)
        fr = {k: self.betas.frac(k) for k in BETA_RANGE}
        return frac_equals_zero(relation.evaluate_frac(fr), policy).outcome is Outcome.YES

    def in_span(self, relation):
        """Whether a relation lies in the linear span of the discovered ones."""
        if isinstance(relation, str):
            relation = Relation.parse(relation)
        idx = sorted(set(relation.indices()) | {k for r in self.relations for k in r.indices()})
        mons = _monomials(idx, max(self.degree_bound, relation.degree))
        rows = [r.vector(mons) for r in self.relations]
        if not rows:
            return all(c == 0 for _, c in relation.terms)
        base = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in r] for r in rows])
        both = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in r]
                               for r in rows + [relation.vector(mons)]])
        return both.rref()[1] == base.rref()[1]

    def lines(self):
        out = [f"ode: {self.ode}",
               f"f44 identically zero: {self.f44_zero}",
               f"f444 identically zero: {self.f444_zero}"]
        if not self.in_class:
            return out
        for k in BETA_RANGE:
            e = self.constancy[f"beta{k}"]
            if e.is_constant:
                out.append(f"beta{k}: constant {e.value}")
            else:
                out.append(f"beta{k}: {e.status}")
        for r in self.relations:
            out.append(f"relation: {r}")
        return out


def _flag(ode, name, policy):
    return ode.table().is_identically_zero(name, policy).outcome


def signature(ode, degree_bound=2, policy=Policy(), n_points=None, budget_factor=10):
    """Class flags, beta constancy and confirmed polynomial relations."""
    ode = _as_ode(ode)
    f44 = _flag(ode, "f44", policy)
    f444 = _flag(ode, "f444", policy)
    sig = InvariantSignature(ode, f44, f444, degree_bound=degree_bound)
    if not sig.in_class:
        return sig
    try:
        bs = betas(ode, policy)
    except OutOfClass:
        return sig
    sig.constancy = classify_constancy(bs, ode, policy)
    idx = sig.non_constant()
    if len(idx) >= 1 and degree_bound >= 1:
        _discover_relations(sig, bs, idx, degree_bound, policy, n_points, budget_factor)
    return sig


def _discover_relations(sig, bs, idx, degree, policy, n_points, budget_factor):
    mons = _monomials(idx, degree)
    need = n_points or 2 * len(mons) + 10
    names = set(E.VARIABLES) | set(sig.ode.parameters)
    rows, exact = [], True
    with mpmath.workdps(policy.precision + 10):
        for pt in sample_points(names, budget_factor * need, policy.seed + 104729):
            vals = {}
            for k in idx:
                v = point_values(bs.frac(k), pt, policy.precision)
                if v is None:
                    break
                vals[k] = v
            else:
                exact = exact and all(isinstance(v, Fraction) for v in vals.values())
                rows.append([_row_value(m, vals) for m in mons])
                if len(rows) >= need:
                    break
    if len(rows) < need:
        raise SamplingError(f"only {len(rows)} of {need} sample points were valid")
    basis = _exact_nullspace(rows) if exact else _numeric_nullspace(rows)
    fr = {k: bs.frac(k) for k in BETA_RANGE}
    for v in basis:
        rel = Relation.from_dict(dict(zip(mons, v)))
        if not rel.terms:
            continue
        dec = frac_equals_zero(rel.evaluate_frac(fr), policy)
        if dec.outcome is Outcome.YES:
            sig.relations.append(rel)
        else:
            sig.rejected.append(rel)


# ---------------------------------------------------------------------------
# verdicts

@dataclass
class Verdict:
    evidence: list = field(default_factory=list)

    outcome = ""

    @property
    def is_not_equivalent(self):
        return isinstance(self, NotEquivalent)

    def lines(self):
        return [f"verdict: {self.outcome}"] + [f"  {e}" for e in self.evidence]


@dataclass
class NotEquivalent(Verdict):
    witness: str = ""
    witnesses: list = field(default_factory=list)

    outcome = "not-equivalent"

    def __post_init__(self):
        if not self.witnesses:
            self.witnesses = [self.witness]

    def lines(self):
        out = [f"verdict: {self.outcome}"] + [f"  witness: {w}" for w in self.witnesses]
        return out + [f"  {e}" for e in self.evidence]


@dataclass
class Inconclusive(Verdict):
    outcome = "inconclusive"


def _is_number(v):
    return isinstance(v, E.Const)


def compare(a: InvariantSignature, b: InvariantSignature, policy=Policy()) -> Verdict:
    """Necessary-condition comparison of two signatures."""
    if a.class_flags != b.class_flags:
        return NotEquivalent(witness=f"class flags differ: (f44==0, f444==0) = "
                                     f"({a.f44_zero}, {a.f444_zero}) vs ({b.f44_zero}, {b.f444_zero})")
    if not a.in_class:
        return Inconclusive(["both equations lie outside the invariant class"])
    evidence, witnesses = [], []
    for k in BETA_RANGE:
        ea, eb = a.constancy[f"beta{k}"], b.constancy[f"beta{k}"]
        if ea.is_constant and eb.is_constant:
            va, vb = ea.value, eb.value
            if _is_number(va) and _is_number(vb):
                if va.value != vb.value:
                    witnesses.append(f"beta{k}: {va} != {vb}")
                else:
                    evidence.append(f"beta{k} = {va} on both sides")
            else:
                evidence.append(f"beta{k}: constants {va} and {vb} depend on parameters")
        elif ea.is_constant != eb.is_constant:
            const, other = ("first", eb) if ea.is_constant else ("second", ea)
            if other.status is Constancy.NON_CONSTANT:
                witnesses.append(f"beta{k} is constant for the {const} equation "
                                 f"and provably non-constant for the other")
            else:
                evidence.append(f"beta{k}: constancy undecided on one side")
        else:
            evidence.append(f"beta{k} non-constant on both sides")
    for mine, theirs, label in ((a, b, "first"), (b, a, "second")):
        fr = {k: theirs.betas.frac(k) for k in BETA_RANGE}
        for rel in mine.relations:
            dec = frac_equals_zero(rel.evaluate_frac(fr), policy)
            if dec.outcome is Outcome.NO:
                witnesses.append(f"relation of the {label} equation fails on the other: {rel}")
            elif dec.outcome is Outcome.YES:
                evidence.append(f"relation {rel} holds on both sides")
    if witnesses:
        return NotEquivalent(evidence, witnesses[0], witnesses)
    return Inconclusive(evidence)


# ---------------------------------------------------------------------------
# parametrized reference families

@dataclass
class Family:
    """Betas of a reference equation written in auxiliary symbols.

    ``betas`` maps k to an Expr in the auxiliary symbols and parameters
    (missing k means 0).  ``pilots`` gives, in order, each auxiliary symbol
    as an Expr in beta1..beta11, the parameters and earlier auxiliaries.
    """

    name: str
    betas: dict
    pilots: list
    parameters: tuple = ()

    def __post_init__(self):
        self.betas = {k: parse(v) if isinstance(v, str) else v for k, v in self.betas.items()}
        self.pilots = [(s, parse(v) if isinstance(v, str) else v) for s, v in self.pilots]

    def beta(self, k):
        return self.betas.get(k, E.ZERO)


@dataclass
class MatchEntry:
    name: str
    outcome: Outcome
    method: str
    expected: object = None
    witness: dict | None = None


@dataclass
class MatchReport:
    ode: OdeSpec
    family: str
    aux: dict
    entries: dict

    @property
    def passed(self):
        return all(e.outcome is Outcome.YES for e in self.entries.values())

    def mismatches(self):
        return [n for n, e in self.entries.items() if e.outcome is not Outcome.YES]

    def lines(self):
        out = [f"family: {self.family}", f"ode: {self.ode}"]
        out += [f"{s} = {v}" for s, v in self.aux.items()]
        out += [f"{n}: {'match' if e.outcome is Outcome.YES else 'mismatch'} ({e.method})"
                for n, e in self.entries.items()]
        return out


def match_transformed_signature(ode, family: Family, policy=Policy()) -> MatchReport:
    """Solve the pilots on the ode's betas and compare every family beta."""
    ode = _as_ode(ode)
    bs = betas(ode, policy)
    beta_bind = {f"beta{k}": bs[k] for k in BETA_RANGE}
    aux = {}
    for s, expr in family.pilots:
        try:
            val = simplify(replace(expr, {**beta_bind, **{n: v for n, v in aux.items()}}))
        except ZeroDivisionError as exc:
            raise DegeneratePilot(f"pilot for {s} is undefined on this equation") from exc
        aux[s] = val
    entries = {}
    for k in BETA_RANGE:
        try:
            want = simplify(replace(family.beta(k), aux))
        except ZeroDivisionError as exc:
            raise DegeneratePilot(f"family beta{k} is undefined at the pilot values") from exc
        dec = equals_zero(E.sub(bs[k], want), policy)
        entries[f"beta{k}"] = MatchEntry(f"beta{k}", dec.outcome, dec.method, want, dec.witness)
    return MatchReport(ode, family.name, aux, entries)


__all__ = ["BETA_NAMES", "DegeneratePilot", "Family", "Inconclusive", "InvariantSignature",
           "MatchEntry", "MatchReport", "NotEquivalent", "Relation", "SamplingError", "Verdict",
           "compare", "match_transformed_signature", "signature"]
