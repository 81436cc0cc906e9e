from fractions import Fraction

import pytest

from odeinv.invariants import OutOfClass, alphas, betas
from odeinv.invops import FIBER, POINT, apply, operator, operators
from odeinv.jet import OdeSpec, total_derivative
from odeinv.kernel import equal, evaluate, parse
from odeinv.transforms import FiberTransform, pushforward_ode, pushforward_point

PT = {"x": Fraction(3, 2), "y": Fraction(4, 3), "p": Fraction(1, 2), "q": Fraction(5, 4)}


def test_point_d1_on_f44():
    # N = 1/f44 so D1(f44) = f444/f44
    op = operator(POINT, 1, "q^3")
    assert apply(op, "6*q") is parse("1/q")


def test_point_d4_is_total_derivative():
    ode = OdeSpec("x*q^3 + y*q^4")
    op = operator(POINT, 4, ode)
    J = parse("x*y + p^2*q")
    assert equal(apply(op, J), total_derivative(J, ode))


def test_constant_invariant_goes_to_zero():
    ops = operators(FIBER, "q^3")
    for op in ops:
        assert apply(op, "1/12") == 0


def test_fiber_needs_f444():
    with pytest.raises(OutOfClass):
        operator(FIBER, 1, "q^2")
    operator(POINT, 1, "q^2")


def test_bad_group_and_index():
    with pytest.raises(ValueError):
        operator("affine", 1, "q^3")
    with pytest.raises(ValueError):
        operator(POINT, 5, "q^3")


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_fiber_operator_output_is_invariant(k):
    f = OdeSpec("q^3 + y*q^4")
    t = FiberTransform("2*x + 1", "x + 3*y")
    g = pushforward_ode(f, t)
    bar = pushforward_point(PT, t)
    lhs = evaluate(apply(operator(FIBER, k, g), betas(g)[5]), PT)
    rhs = evaluate(apply(operator(FIBER, k, f), betas(f)[5]), bar)
    assert lhs == rhs


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_point_operator_output_is_invariant(k):
    f = OdeSpec("q^3 + y*q^4")
    t = FiberTransform("x", "x^2 + 2*y")
    g = pushforward_ode(f, t)
    bar = pushforward_point(PT, t)
    lhs = evaluate(apply(operator(POINT, k, g), alphas(g)[3]), PT)
    rhs = evaluate(apply(operator(POINT, k, f), alphas(f)[3]), bar)
    assert lhs == rhs


def test_operator_str():
    s = str(operator(POINT, 1, "q^3"))
    assert s.startswith("D1[point-subgroup]")
