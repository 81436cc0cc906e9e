"""Exact checks on the 35-operator algebra and the reduced annihilation systems."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..invariants import alpha_formulas, beta_formulas, gamma_formulas
from .fields import (N_OPERATORS, StructureTable, combination, commutator,
                     format_combination, load_appendix_a, load_appendix_b,
                     load_reduced)
from .poly import G_VARS, L_VARS, Poly

# e-indices of G1..G8; each G_k contains the previous ones
CHAIN_STEPS = (
    range(22, 29),
    range(16, 22),
    range(11, 16),
    range(7, 11),
    (4, 5, 6),
    (33, 34, 35),
    (31, 32),
    (1, 2, 3, 29, 30),
)


def chain_members():
    """[G1, ..., G8] as sorted lists of e-indices."""
    out, acc = [], []
    for step in CHAIN_STEPS:
        acc = sorted(acc + list(step))
        out.append(acc)
    return out


@dataclass
class Mismatch:
    where: str
    expected: str
    actual: str

    def __str__(self):
        return f"{self.where}: expected {self.expected}, got {self.actual}"


@dataclass
class Report:
    name: str
    checks: int = 0
    mismatches: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.mismatches

    def lines(self):
        status = "ok" if self.passed else "FAILED"
        out = [f"{self.name}: {status} ({self.checks} checks, {len(self.mismatches)} mismatches)"]
        out += [f"  {n}" for n in self.notes]
        out += [f"  mismatch {m}" for m in self.mismatches]
        return out

    def __str__(self):
        return "\n".join(self.lines())


# ---------------------------------------------------------------------------
# commutator table

def _pair_result(i, j):
    ops = load_appendix_a()
    got = commutator(ops[i - 1], ops[j - 1])
    want_coeffs = load_appendix_b().bracket(i, j)
    want = combination(ops, [want_coeffs.get(k, 0) for k in range(1, N_OPERATORS + 1)])
    bad = []
    for pos, (a, b) in enumerate(zip(want.coeffs, got.coeffs), 1):
        if a != b:
            bad.append(Mismatch(f"[e{i}, e{j}] position {pos}", str(a), str(b)))
    if bad:
        # one line naming the table entry, then the first differing coefficient
        bad = [Mismatch(f"[e{i}, e{j}]", format_combination(want_coeffs), "a bracket differing from it")] + bad[:1]
    return (i, j), bad


def verify_commutator_table(workers=1) -> Report:
    """Recompute all 595 brackets and compare with the structure table."""
    pairs = [(i, j) for i in range(1, N_OPERATORS + 1) for j in range(i + 1, N_OPERATORS + 1)]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_pair_result, *zip(*pairs), chunksize=16))
    else:
        results = [_pair_result(i, j) for i, j in pairs]
    rep = Report("commutator table", checks=len(pairs))
    for _, bad in sorted(results):
        rep.mismatches.extend(bad)
    rep.notes.append(f"{len(load_appendix_b())} nonzero table entries")
    return rep


def verify_jacobi(samples=200, seed=0, terms=3) -> Report:
    """Jacobi identity on random triples of small integer combinations."""
    ops = load_appendix_a()
    rng = random.Random(f"jacobi:{seed}")
    rep = Report("jacobi identity")
    for s in range(samples):
        trio = []
        for name in "abc":
            idx = rng.sample(range(N_OPERATORS), terms)
            c = [0] * N_OPERATORS
            for k in idx:
                c[k] = rng.choice([-3, -2, -1, 1, 2, 3])
            trio.append(combination(ops, c, name))
        a, b, c = trio
        total = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
        rep.checks += 1
        if not total.is_zero():
            pos, val = total.nonzero()[0]
            rep.mismatches.append(Mismatch(f"sample {s} position {pos}", "0", str(val)))
    return rep


# ---------------------------------------------------------------------------
# solvable chain

def verify_solvable_chain(table: StructureTable = None) -> Report:
    """Check G_k is an ideal of G_(k+1) for k = 0..7 and that G1 is abelian."""
    table = table or load_appendix_b()
    groups = [[]] + chain_members()
    rep = Report("solvable chain")
    for k in range(len(groups) - 1):
        inner, outer = set(groups[k]), groups[k + 1]
        bad = []
        for a in outer:
            for b in sorted(inner):
                br = table.bracket(a, b)
                stray = sorted(m for m in br if m not in inner)
                if stray:
                    bad.append(Mismatch(f"G{k} in G{k + 1}: [e{a}, e{b}]",
                                        f"span of G{k}", format_combination(br)))
        rep.checks += 1
        rep.mismatches.extend(bad)
        if not bad:
            rep.notes.append(f"G{k} is an ideal of G{k + 1} (dim {len(inner)} in {len(outer)})")
    g1 = groups[1]
    nonzero = [(a, b) for a in g1 for b in g1 if a < b and table.bracket(a, b)]
    rep.checks += 1
    for a, b in nonzero:
        rep.mismatches.append(Mismatch(f"G1 abelian: [e{a}, e{b}]", "0", format_combination(table.bracket(a, b))))
    if not nonzero:
        rep.notes.append("G1 is abelian")
    if groups[-1] != list(range(1, N_OPERATORS + 1)):
        rep.mismatches.append(Mismatch("G8", "e1..e35", str(groups[-1])))
    return rep


# ---------------------------------------------------------------------------
# annihilation

def _symbols(names):
    return {k: Poly.var(names, k - 1) for k in range(1, len(names) + 1)}


def beta_in_gamma():
    """beta_1..beta_11 as Laurent polynomials in g1..g20."""
    return beta_formulas(_symbols(G_VARS))


def alpha_in_lambda():
    """alpha_1..alpha_17 as Laurent polynomials in l1..l24."""
    l = _symbols(L_VARS)
    return alpha_formulas(l, l[1])


def gamma_in_lambda():
    """gamma_4..gamma_16 as Laurent polynomials in l1..l24."""
    return gamma_formulas(_symbols(L_VARS))


def _annihilate(rep, ops, formulas, symbol):
    for name, op in ops.items():
        for k, J in formulas.items():
            rep.checks += 1
            r = op(J)
            if not r.is_zero():
                rep.mismatches.append(Mismatch(f"{name} {symbol}{k}", "0", str(r)))


def verify_gamma_annihilation() -> Report:
    """The five gamma-coordinate operators kill every beta."""
    rep = Report("beta annihilation (gamma coordinates)")
    _annihilate(rep, load_reduced("gamma"), beta_in_gamma(), "beta")
    return rep


def verify_lambda_annihilation(extended=False) -> Report:
    """X1, X2, X3 in lambda coordinates kill every alpha.

    With ``extended`` the remaining lambda-coordinate operators T3..T6 are
    also applied to gamma_4..gamma_16.
    """
    ops = load_reduced("lambda")
    rep = Report("alpha annihilation (lambda coordinates)")
    _annihilate(rep, {n: ops[n] for n in ("X1", "X2", "X3")}, alpha_in_lambda(), "alpha")
    if extended:
        _annihilate(rep, {n: ops[n] for n in ("T3", "T4", "T5", "T6")}, gamma_in_lambda(), "gamma")
    return rep


def verify_all(jacobi_samples=200, seed=0, workers=1):
    return [verify_commutator_table(workers), verify_jacobi(jacobi_samples, seed),
            verify_solvable_chain(), verify_gamma_annihilation(), verify_lambda_annihilation()]


__all__ = ["CHAIN_STEPS", "Mismatch", "Report", "alpha_in_lambda", "beta_in_gamma",
           "chain_members", "gamma_in_lambda", "verify_all",
           "verify_commutator_table", "verify_gamma_annihilation", "verify_jacobi",
           "verify_lambda_annihilation", "verify_solvable_chain"]
