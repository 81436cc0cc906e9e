from fractions import Fraction

import pytest

from odeinv import corpus
from odeinv.equivalence import (DegeneratePilot, Inconclusive, NotEquivalent,
                                Relation, compare, match_transformed_signature,
                                signature)
from odeinv.invariants import Constancy
from odeinv.kernel import Outcome, equal, parse
from odeinv.transforms import FiberTransform, pushforward_ode, random_fiber_transform


@pytest.fixture(scope="module")
def sigs():
    return {f: signature(f) for f in ("q^3", "q^4", corpus.EX2_BAR, corpus.EX2_PUSHED,
                                       corpus.EX2_RIVAL, corpus.EX3_BAR, corpus.EX3_PUSHED)}


def test_relation_parse_and_print():
    r = Relation.parse(corpus.EX3_I1)
    assert r.degree == 1 and r.indices() == [5, 6]
    assert str(r) == "3*beta5 - 2*beta6 + 5/9 = 0"
    assert Relation.parse(corpus.EX3_I2).degree == 2


def test_cubic_signature(sigs):
    s = sigs["q^3"]
    assert s.in_class
    assert s.constants()[5] == Fraction(1, 12) and s.constants()[6] == Fraction(1, 3)
    assert s.non_constant() == [] and s.relations == []


def test_out_of_class_signature():
    s = signature("q^2")
    assert s.class_flags == (Outcome.NO, Outcome.YES)
    assert not s.in_class and s.constancy is None


def test_power_family_relations(sigs):
    s = sigs[corpus.EX3_BAR]
    assert s.non_constant() == [5, 6, 11]
    assert s.relations
    assert s.implies(corpus.EX3_I1) and s.implies(corpus.EX3_I2)
    assert s.in_span(corpus.EX3_I1) and s.in_span(corpus.EX3_I2)
    assert not s.implies("beta5 - 1")
    assert not s.in_span("beta5 - 1")


def test_quartic_vs_cubic(sigs):
    v = compare(sigs["q^4"], sigs["q^3"])
    assert isinstance(v, NotEquivalent)
    assert v.witness.startswith("beta5")
    assert len(v.witnesses) == 3


def test_pushed_cubic_is_inconclusive(sigs):
    assert isinstance(compare(sigs[corpus.EX2_PUSHED], sigs[corpus.EX2_BAR]), Inconclusive)


def test_rival_equation_not_equivalent(sigs):
    s = sigs[corpus.EX2_RIVAL]
    assert s.status(5) is Constancy.NON_CONSTANT
    v = compare(s, sigs[corpus.EX2_BAR])
    assert isinstance(v, NotEquivalent)
    assert any(w.startswith("beta5 ") for w in v.witnesses)


def test_class_flag_mismatch():
    v = compare(signature("q^2"), signature("q^3"))
    assert isinstance(v, NotEquivalent) and "class flags" in v.witness


def test_both_out_of_class_inconclusive():
    assert isinstance(compare(signature("q^2"), signature("p*q^2")), Inconclusive)


def test_compare_is_symmetric_and_reflexive(sigs):
    names = list(sigs)
    for a in names:
        assert isinstance(compare(sigs[a], sigs[a]), Inconclusive), a
        for b in names:
            assert type(compare(sigs[a], sigs[b])) is type(compare(sigs[b], sigs[a]))


def test_compare_sound_on_transformed_pairs(sigs):
    assert isinstance(compare(sigs[corpus.EX3_BAR], sigs[corpus.EX3_PUSHED]), Inconclusive)
    ode = "q^3 + y*q^4"
    for seed in range(3):
        other = pushforward_ode(ode, random_fiber_transform(seed, degree_bound=1))
        assert isinstance(compare(signature(ode), signature(other)), Inconclusive)


def test_power_family_match():
    m = match_transformed_signature(corpus.EX3_PUSHED, corpus.ex3_family())
    assert m.passed
    assert equal(m.aux["s"], parse(corpus.EX3_S_BAR)).outcome is Outcome.YES


def test_family_mismatch_reported():
    m = match_transformed_signature("q^3", corpus.ex3_family())
    assert not m.passed
    assert m.mismatches() == ["beta6", "beta11"]


def test_degenerate_pilot():
    with pytest.raises(DegeneratePilot):
        match_transformed_signature(corpus.HYPER_CR, corpus.ex4_family())


def test_moebius_family_match():
    m = match_transformed_signature(corpus.EX4_PUSHED, corpus.ex4_family())
    assert m.passed
    assert equal(m.aux["t"], parse(corpus.EX4_T_BAR)).outcome is Outcome.YES
