from fractions import Fraction

import pytest

from odeinv import corpus
from odeinv.jet import OdeSpec
from odeinv.kernel import Outcome, equal, equals_zero, evaluate, parse
from odeinv.kernel import expr as E
from odeinv.transforms import (DegenerateTransform, FiberTransform, NotInvertible,
                               identity, invariance_check, pushforward_ode,
                               pushforward_point, random_fiber_transform,
                               transport_ode)


def same_ode(a, b):
    return equals_zero(E.sub(a.f, b.f)).outcome is Outcome.YES


def test_log_map_of_cubic():
    got = pushforward_ode(corpus.EX2_BAR, corpus.ex2_transform())
    assert same_ode(got, OdeSpec(corpus.EX2_PUSHED))


def test_inversion_of_quartic_family():
    got = pushforward_ode(corpus.EX3_BAR, corpus.ex3_transform())
    assert same_ode(got, OdeSpec(corpus.EX3_PUSHED))


def test_moebius_map_at_unit_parameter():
    got = pushforward_ode(corpus.EX4_BAR_A1, corpus.ex4_transform())
    assert same_ode(got, OdeSpec(corpus.EX4_PUSHED))


def test_identity_is_neutral():
    ode = OdeSpec("x*q^3 + y*p")
    assert same_ode(pushforward_ode(ode, identity()), ode)
    assert identity().is_identity()


def test_transport_undoes_pushforward():
    t = corpus.ex3_transform()
    ode = OdeSpec(corpus.EX3_BAR)
    assert same_ode(transport_ode(pushforward_ode(ode, t), t), ode)


def test_pushforward_point_example():
    t = corpus.ex2_transform()
    out = pushforward_point({"x": 1, "y": 0, "p": 1, "q": 1}, t)
    assert out["x"] == 0 and out["y"] == 1
    # p_bar = x (1 + p), q_bar = x (x p_bar)' = x (1 + p + x q)
    assert out["p"] == 2 and out["q"] == 3


def test_composition_is_functorial():
    t1 = FiberTransform("2*x + 1", "x + 3*y")
    t2 = FiberTransform("x^2", "x*y + 1")
    ode = OdeSpec("q^3 + y*q^4")
    step = pushforward_ode(pushforward_ode(ode, t1), t2)
    once = pushforward_ode(ode, t1.compose(t2))
    assert same_ode(step, once)
    assert equal((t1 @ t2).phi, parse("2*x^2 + 1"))


def test_moebius_inverse():
    t = corpus.ex4_transform()
    a, b = t.verify_inverse()
    assert a.outcome is Outcome.YES and b.outcome is Outcome.YES
    assert t.inverse().inverse() is t


def test_nonlinear_psi_needs_inverse():
    with pytest.raises(NotInvertible):
        FiberTransform("x", "y^3 + y").inverse()


@pytest.mark.parametrize("phi, psi", [("y", "y"), ("x", "x^2"), ("1", "y")])
def test_degenerate_transforms_rejected(phi, psi):
    with pytest.raises(DegenerateTransform):
        FiberTransform(phi, psi)


def test_random_transforms_deterministic_and_regular():
    seen = set()
    for seed in range(12):
        t = random_fiber_transform(seed)
        assert str(t) == str(random_fiber_transform(seed))
        seen.add(str(t))
        for x in (1, 2, 3):
            assert evaluate(t.phi_x, {"x": x}) >= Fraction(1, 4)
            for y in (1, 2, 3):
                assert evaluate(t.psi_y, {"x": x, "y": y}) >= Fraction(1, 4)
    assert len(seen) == 12


def test_random_affine_family():
    for seed in range(5):
        t = random_fiber_transform(seed, degree_bound=1)
        assert not t.phi_x.free_variables()
        assert not t.psi_y.free_variables()


def test_beta_invariance_exact():
    rep = invariance_check("q^3 + y*q^4", FiberTransform("2*x + 1", "x + 3*y"), n_points=5)
    assert rep.passed and rep.exact and rep.points == 5


def test_beta_invariance_series_matches_symbolic_route():
    ode, t = "x*q^4 + p*q^3", random_fiber_transform(3)
    a = invariance_check(ode, t, n_points=3, route="series")
    b = invariance_check(ode, t, n_points=3, route="symbolic")
    assert a.passed and b.passed


def test_alpha_invariance_needs_fixed_x():
    with pytest.raises(ValueError):
        invariance_check("q^3", FiberTransform("2*x", "y"), kind="alpha")
    rep = invariance_check("q^3 + y*q^4", FiberTransform("x", "x^2 + 2*y"), n_points=4, kind="alpha")
    assert rep.passed


def test_invariance_detects_wrong_pairing():
    # beta of a non-invariant quantity: compare against a different transform's image
    from odeinv.transforms import transformed_table_values
    from odeinv.invariants import beta_from_table, beta_values
    ode = OdeSpec("q^3 + y*q^4")
    t = FiberTransform("2*x + 1", "x + 3*y")
    pt = {"x": Fraction(3, 2), "y": Fraction(4, 3), "p": Fraction(1, 2), "q": Fraction(5, 4)}
    lhs = beta_from_table(transformed_table_values(ode, t, pt))
    assert lhs == beta_values(ode, pushforward_point(pt, t))
    assert lhs != beta_values(ode, pt)
