"""Reference equations, transformations and families from the worked examples.

``run_examples`` replays the four worked examples end to end and records one
check per closed-form value.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .equivalence import (Family, Inconclusive, NotEquivalent, compare,
                          match_transformed_signature, signature)
from .invariants import BETA_RANGE, Constancy, betas, classify_constancy
from .jet import OdeSpec
from .kernel import Outcome, Policy, equal, parse
from .kernel import expr as E
from .kernel.ops import replace
from .transforms import FiberTransform, pushforward_ode

# equations (f of y''' = f)
Q3 = "q^3"
Q4 = "q^4"
HYPER_CR = "q^(3/2)"
EX2_BAR = "A*q^3"
EX2_PUSHED = "(A*(x + x*p + x^2*q)^3 - 3*x^2*q - x*p - x)/x^3"
EX2_RIVAL = "3*q^2/p + A*q^3/p^5"
EX3_GENERAL = "A*x^alpha*q^delta"
EX3_BAR = "A*x^3*q^4"
EX3_PUSHED = "-A*x^4*q^4 - 3*q/x"
EX4_BAR = "A*y^(-7)*p^7*q^3"
EX4_BAR_A1 = "y^(-7)*p^7*q^3"
EX4_PUSHED = "q*((p*x - p - y)^7*(x - 1)^12*q^2 - 3*y^7)/(y^7*(x - 1))"

CORPUS = {
    "q^3": Q3,
    "q^4": Q4,
    "q^(3/2)": HYPER_CR,
    "A*x^3*q^4": EX3_BAR,
    "A*y^(-7)*p^7*q^3": EX4_BAR,
}


def ex2_transform():
    return FiberTransform("ln(x)", "x + y", inverse=("exp(x)", "y - exp(x)"))


def ex3_transform():
    return FiberTransform("1/x", "y/x")


def ex4_transform():
    return FiberTransform("x/(x - 1)", "y/(x - 1)")


CUBIC_CONSTANTS = {5: "1/12", 6: "1/3"}          # the q^3 values, others 0
QUARTIC_CONSTANTS = {5: "5/27", 6: "5/9", 11: "5/243"}

EX3_GENERAL_BETAS = {
    5: "(2*delta - 3)*(delta - 2)^2/(3*delta*(delta - 1)^2)"
       " + alpha*(delta - 2)^2/(A*delta*(delta - 1)^2)*s",
    6: "2*(delta - 2)*(2*delta - 3)/(3*delta*(delta - 1))"
       " + alpha*(delta - 2)/(A*delta*(delta - 1))*s",
    11: "2*(delta - 2)^3*(delta - 3)*(2*delta - 3)/(9*delta^2*(delta - 1)^3)"
        " + alpha*(delta - 2)^3*(delta - 3)/(A*delta^2*(delta - 1)^3)*s"
        " + alpha*(alpha - 1)*(delta - 2)^3/(A^2*delta^2*(delta - 1)^3)*s^2",
}
EX3_GENERAL_S = "x^(-1 - alpha)*q^(1 - delta)"

EX3_BETAS = {5: "5/27 + s/(3*A)", 6: "5/9 + s/(2*A)", 11: "5/243 + s/(18*A) + s^2/(9*A^2)"}
EX3_S = "x^(-4)*q^(-3)"
EX3_S_BAR = "x^(-5)*q^(-3)"
EX3_I1 = "3*beta5 - 2*beta6 + 5/9"
EX3_I2 = "5/243 + 1/18*(3*beta5 - 5/9) + 1/9*(3*beta5 - 5/9)^2 - beta11"

EX4_BETAS = {
    1: "-7/9*s^2 - 7/18*s",
    2: "-7/72*s^3*t - 7/12*s^2 - 7/24*s",
    3: "49/432*s^4*t + 7/27*s^3 + 35/432*s^2",
    4: "35/2592*s^6*t^2 + 245/1296*t*s^5 + (245/648 + 49/1944*t)*s^4 + 161/1296*s^3 + 7/864*s^2",
    5: "7/12*s^3*t + (7/12 - 7/12*t)*s^2 + 7/12*s + 1/12",
    6: "-7/6*t*s^2 + 7/6*s + 1/3",
    7: "7/12*s^3*t - 35/36*s^2 - 7/36*s",
    8: "-245/648*s^4*t + (7/18 + 49/216*t)*s^3 - 35/216*s^2 - 7/216*s",
    9: "7/432*t^2*s^5 + 49/1296*s^4*t + (49/108 + 7/432*t)*s^3 + 35/432*s^2",
    10: "-217/7776*s^6*t^2 - 343/2592*t*s^5 + (-49/432 - 245/3888*t)*s^4"
        " + 175/2592*s^3 + 35/2592*s^2",
    11: "7/9*t^2*s^4 - 35/36*s^3*t",
}
EX4_S = "y^7*p^(-8)*q^(-1)"
EX4_T = "y^(-8)*p^10"
EX4_S_BAR = "(x - 1)^(-10)*y^7*(p - x*p + y)^(-8)*q^(-1)"
EX4_T_BAR = "(x - 1)^8*y^(-8)*(p - x*p + y)^10"


def ex3_family():
    """Betas of A x^3 q^4 in s, with the pilot s = A(3 beta5 - 5/9)."""
    return Family("A*x^3*q^4", dict(EX3_BETAS), [("s", "A*(3*beta5 - 5/9)")], ("A",))


def ex4_family():
    """Betas of y^-7 p^7 q^3 in s and t.

    Pilots: beta7 + 6 beta2 - 23/4 beta1 = 7/24 s isolates s, then beta6
    gives t.
    """
    return Family("y^(-7)*p^7*q^3", dict(EX4_BETAS),
                  [("s", "24/7*(beta7 + 6*beta2 - 23/4*beta1)"),
                   ("t", "(7/6*s + 1/3 - beta6)*6/(7*s^2)")])


def substitute_aux(text, **aux):
    """Parse a family expression and substitute auxiliary symbols."""
    return replace(parse(text), {k: parse(v) if isinstance(v, str) else v for k, v in aux.items()})


# ---------------------------------------------------------------------------
# running the examples

@dataclass
class Check:
    label: str
    passed: bool
    detail: str = ""


@dataclass
class ExampleResult:
    name: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, label, passed, detail=""):
        self.checks.append(Check(label, bool(passed), detail))

    def lines(self):
        out = [f"{self.name}: {'ok' if self.passed else 'FAILED'}"]
        for c in self.checks:
            out.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.label}" + (f": {c.detail}" if c.detail else ""))
        out += [f"  note: {n}" for n in self.notes]
        return out


def _yes(dec):
    return dec.outcome is Outcome.YES


def beta_constants_match(ode, expected, policy=Policy()):
    """All eleven betas equal the expected constants exactly (missing = 0)."""
    bs = betas(ode, policy)
    bad = []
    for k in BETA_RANGE:
        want = parse(expected.get(k, "0"))
        got = bs[k]
        if not (isinstance(got, E.Const) and got is want):
            bad.append(f"beta{k} = {got}, expected {want}")
    return bad


def betas_match(ode, formulas, aux, policy=Policy()):
    """Every beta equals the formula (missing = 0) after substituting aux."""
    bs = betas(ode, policy)
    bad = []
    for k in BETA_RANGE:
        want = substitute_aux(formulas.get(k, "0"), **aux)
        dec = equal(bs[k], want, policy)
        if not _yes(dec):
            bad.append(f"beta{k} ({dec.outcome})")
    return bad


def example_1(policy=Policy()):
    r = ExampleResult("Example 1 (q^4 vs q^3)")
    r.add("beta(q^4) equals the expected constants", not beta_constants_match(Q4, QUARTIC_CONSTANTS, policy))
    r.add("beta(q^3) equals the expected constants", not beta_constants_match(Q3, CUBIC_CONSTANTS, policy))
    v = compare(signature(Q4, policy=policy), signature(Q3, policy=policy), policy)
    r.add("q^4 and q^3 are not equivalent", isinstance(v, NotEquivalent), getattr(v, "witness", ""))
    return r


def example_2(policy=Policy()):
    r = ExampleResult("Example 2 (logarithmic map of A q^3)")
    pushed = pushforward_ode(EX2_BAR, ex2_transform())
    r.add("A q^3 under x = ln x, y = x + y gives the pushed-forward equation", _yes(equal(pushed.f, parse(EX2_PUSHED), policy)),
          str(pushed.f))
    r.add("the pushed-forward equation has the constants of q^3", not beta_constants_match(pushed, CUBIC_CONSTANTS, policy))
    cons = classify_constancy(betas(EX2_RIVAL, policy), policy=policy)
    e5 = cons["beta5"]
    r.add("beta5 of 3 q^2/p + A q^3/p^5 is provably non-constant", e5.status is Constancy.NON_CONSTANT,
          f"witness {e5.witness}" if e5.witness else e5.method)
    sig_bar = signature(EX2_BAR, policy=policy)
    v4 = compare(signature(EX2_PUSHED, policy=policy), sig_bar, policy)
    r.add("the pushed-forward equation vs A q^3 is inconclusive", isinstance(v4, Inconclusive))
    v5 = compare(signature(EX2_RIVAL, policy=policy), sig_bar, policy)
    r.add("3 q^2/p + A q^3/p^5 vs A q^3 is not equivalent", isinstance(v5, NotEquivalent), getattr(v5, "witness", ""))
    r.add("q^(3/2) has all betas zero", not beta_constants_match(HYPER_CR, {}, policy))
    return r


def example_3(policy=Policy()):
    r = ExampleResult("Example 3 (power family A x^alpha q^delta)")
    r.add("general exponents: beta5, beta6, beta11 formulas",
          not betas_match(EX3_GENERAL, EX3_GENERAL_BETAS, {"s": EX3_GENERAL_S}, policy))
    r.add("A x^3 q^4: betas in s = x^-4 q^-3", not betas_match(EX3_BAR, EX3_BETAS, {"s": EX3_S}, policy))
    pushed = pushforward_ode(EX3_BAR, ex3_transform())
    r.add("x = 1/x, y = y/x gives -A x^4 q^4 - 3 q/x", _yes(equal(pushed.f, parse(EX3_PUSHED), policy)), str(pushed.f))
    r.add("transformed betas in s = x^-5 q^-3", not betas_match(EX3_PUSHED, EX3_BETAS, {"s": EX3_S_BAR}, policy))
    m = match_transformed_signature(EX3_PUSHED, ex3_family(), policy)
    r.add("pilot s = A(3 beta5 - 5/9) recovers s = x^-5 q^-3 and matches",
          m.passed and _yes(equal(m.aux["s"], parse(EX3_S_BAR), policy)), f"s = {m.aux['s']}")
    sig = signature(EX3_BAR, policy=policy)
    r.add("I1 vanishes identically", sig.implies(EX3_I1, policy))
    r.add("I2 vanishes identically", sig.implies(EX3_I2, policy))
    r.add("I1 and I2 are among the discovered relations", sig.in_span(EX3_I1) and sig.in_span(EX3_I2))
    return r


def example_4(policy=Policy()):
    r = ExampleResult("Example 4 (A y^-7 p^7 q^3)")
    aux = {"s": EX4_S, "t": EX4_T}
    r.add("A = 1: betas equal the expected polynomials in s, t", not betas_match(EX4_BAR_A1, EX4_BETAS, aux, policy))
    scaled = {"s": f"({EX4_S})/A", "t": f"A*({EX4_T})"}
    r.add("symbolic A: betas equal the polynomials in s/A, A t", not betas_match(EX4_BAR, EX4_BETAS, scaled, policy))
    literal = betas_match(EX4_BAR, EX4_BETAS, aux, policy)
    if literal:
        r.notes.append("with symbolic A the closed forms in s, t do not fit "
                       f"({len(literal)} of 11 betas differ); they hold at A = 1")
    pushed = pushforward_ode(EX4_BAR_A1, ex4_transform())
    r.add("x = x/(x-1), y = y/(x-1) gives the transformed equation", _yes(equal(pushed.f, parse(EX4_PUSHED), policy)))
    r.add("transformed betas in the s, t images",
          not betas_match(EX4_PUSHED, EX4_BETAS, {"s": EX4_S_BAR, "t": EX4_T_BAR}, policy))
    m = match_transformed_signature(EX4_PUSHED, ex4_family(), policy)
    ok = m.passed and _yes(equal(m.aux["s"], parse(EX4_S_BAR), policy)) \
        and _yes(equal(m.aux["t"], parse(EX4_T_BAR), policy))
    r.add("pilots recover the s, t images and match", ok)
    return r


EXAMPLES = {"ex1": example_1, "ex2": example_2, "ex3": example_3, "ex4": example_4}


def run_examples(which=None, policy=Policy()):
    out = []
    for key, fn in EXAMPLES.items():
        if which and key not in which:
            continue
        t0 = time.perf_counter()
        res = fn(policy)
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out


__all__ = ["CORPUS", "Check", "EXAMPLES", "ExampleResult", "OdeSpec", "beta_constants_match",
           "betas_match", "ex2_transform", "ex3_family", "ex3_transform", "ex4_family",
           "ex4_transform", "run_examples", "substitute_aux"]
