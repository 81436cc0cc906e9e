from fractions import Fraction

import pytest

from odeinv.invariants import (Constancy, OutOfClass, alpha_invariants, alphas,
                               beta_values, betas, classify_constancy,
                               gamma_invariants, lambda_invariants)
from odeinv.jet import OdeSpec
from odeinv.kernel import equal, evaluate, parse


@pytest.fixture(scope="module")
def cubic():
    return lambda_invariants(OdeSpec("q^3").table())


def test_lambda_examples(cubic):
    assert cubic[4] is parse("6*q")
    assert cubic[6] == 6
    assert cubic[12] is parse("3*q^4")
    assert len(cubic) == 17


def test_lambda_fractional_power():
    l = lambda_invariants(OdeSpec("q^(3/2)").table())
    assert equal(l[4], parse("3/4*q^(-1/2)"))
    assert equal(l[6], parse("-3/8*q^(-3/2)"))


def test_gamma_examples(cubic):
    g = gamma_invariants(cubic)
    assert g[4] is parse("6*q") and g[5] == 6
    assert g[10] is parse("3*q^4")
    assert g[6] == 0


def test_alpha_examples(cubic):
    a = alpha_invariants(cubic)
    assert a[1] is parse("x")
    assert equal(a[3], parse("1/(6*q^2)"))
    assert a[4] == Fraction(1, 3)


def test_gamma_requires_f444():
    with pytest.raises(OutOfClass) as info:
        betas("q^2")
    assert info.value.precondition == "f444 != 0"


def test_alpha_requires_f44():
    with pytest.raises(OutOfClass) as info:
        alphas("p*q")
    assert info.value.precondition == "f44 != 0"


def test_cubic_betas_constant():
    rep = classify_constancy(betas("q^3"))
    assert rep.all_constant()
    consts = rep.constants()
    assert consts["beta5"] == Fraction(1, 12)
    assert consts["beta6"] == Fraction(1, 3)
    assert all(consts[f"beta{k}"] == 0 for k in (1, 2, 3, 4, 7, 8, 9, 10, 11))


def test_constancy_keeps_parameters_symbolic():
    rep = classify_constancy(betas("A*q^delta"))
    assert rep.all_constant()
    b5 = rep["beta5"].value
    assert b5.parameters() == {"delta"}
    assert evaluate(b5, {"delta": 3}) == Fraction(1, 12)
    q4 = classify_constancy(betas("q^4")).constants()
    for name, v in rep.constants().items():
        assert evaluate(v, {"delta": 4}) == evaluate(q4[name], {})


def test_non_constant_has_witness():
    rep = classify_constancy(betas("q^3 + y*q^4"))
    e = rep["beta5"]
    assert e.status is Constancy.NON_CONSTANT
    assert e.witness is not None
    assert rep["beta1"].is_constant


def test_pointwise_values_match_symbolic():
    ode = OdeSpec("q^3 + y*q^4")
    b = betas(ode)
    pt = {"x": Fraction(2), "y": Fraction(1, 3), "p": Fraction(3, 2), "q": Fraction(5, 7)}
    vals = beta_values(ode, pt)
    for i in b:
        assert vals[i] == evaluate(b[i], pt)


def test_betas_are_cached():
    ode = OdeSpec("q^4")
    assert betas(ode) is betas(ode)
