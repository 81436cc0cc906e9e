from fractions import Fraction

import pytest

from odeinv.lie import (ChecksumError, Poly43, StructureTable, chain_members,
                        combination, commutator, load_appendix_a,
                        load_appendix_b, load_reduced, operator_label,
                        verify_commutator_table, verify_gamma_annihilation,
                        verify_jacobi, verify_lambda_annihilation,
                        verify_solvable_chain)
from odeinv.lie import fields, verify
from odeinv.lie.poly import Poly, Z_VARS


@pytest.fixture(scope="module")
def ops():
    return load_appendix_a()


def nonzero(op):
    return [(pos, str(c)) for pos, c in op.nonzero()]


def test_operator_count_and_labels(ops):
    assert len(ops) == 35
    assert ops[0].id == "e1" and ops[34].id == "e35"
    assert operator_label(1) == "X1" and operator_label(29) == "T1" and operator_label(35) == "T7"


def test_single_entry_operators(ops):
    assert nonzero(ops[0]) == [(2, "1")]
    assert nonzero(ops[28]) == [(1, "1")]
    assert nonzero(ops[1]) == [(3, "1"), (41, "z40")]


def test_x3_and_x5_entries(ops):
    assert str(ops[2].coeffs[3]) == "z4"
    x5 = [str(c) for c in ops[4].coeffs[5:8]]
    assert x5 == ["-z7", "-2*z8", "3"]


def test_commutator_examples(ops):
    e = lambda k: ops[k - 1]
    assert commutator(e(2), e(3)) == combination(ops, [0, 1] + [0] * 33)
    assert commutator(e(1), e(2)).is_zero()
    c = [0] * 35
    c[3] = 2
    assert commutator(e(2), e(5)) == combination(ops, c)


def test_commutator_antisymmetric_and_bilinear(ops):
    a, b, c = ops[4], ops[10], ops[30]
    assert commutator(a, b) == commutator(b, a).scale(-1)
    lhs = commutator(a.scale(Fraction(3, 2)) + c, b)
    rhs = commutator(a, b).scale(Fraction(3, 2)) + commutator(c, b)
    assert lhs == rhs


def test_vector_field_applies_as_derivation(ops):
    z = lambda k: Poly43(f"z{k}")
    X2 = ops[1]
    # X2 = d/dz3 + z40 d/dz41
    assert X2(z(3) * z(3)) == z(3) * 2
    assert X2(z(41)) == z(40)


def test_structure_table_examples():
    t = load_appendix_b()
    assert t.bracket(2, 3) == {2: 1}
    assert t.bracket(3, 2) == {2: -1}
    assert t.bracket(1, 2) == {}
    assert t.bracket(32, 33) == {35: 5}
    assert t.bracket(30, 35) == {35: 5}
    assert t.bracket(4, 5) == {7: 3}


def test_structure_parse_errors():
    with pytest.raises(ValueError):
        StructureTable.parse(["[e3, e2] = e2"])
    with pytest.raises(ValueError):
        StructureTable.parse(["[e2, e3] = x2"])


def test_checksum_tamper_detected():
    text = fields.resources.files(fields.__package__).joinpath("data", "brackets.txt").read_text()
    assert fields.read_data("brackets.txt", text)
    with pytest.raises(ChecksumError):
        fields.read_data("brackets.txt", text.replace("[e2, e5] = 2*e4", "[e2, e5] = 3*e4"))
    with pytest.raises(ChecksumError):
        fields.read_data("brackets.txt", text.rsplit("checksum", 1)[0])


def test_full_table_has_no_mismatches():
    rep = verify_commutator_table()
    assert rep.checks == 595
    assert rep.passed, rep.lines()


def test_corrupted_table_is_reported(monkeypatch):
    good = load_appendix_b()
    entries = dict(good.entries)
    entries[(2, 5)] = {4: Fraction(3)}
    monkeypatch.setattr(verify, "load_appendix_b", lambda: StructureTable(entries))
    rep = verify_commutator_table()
    assert not rep.passed
    assert rep.mismatches[0].where == "[e2, e5]"
    assert "3*e4" in rep.mismatches[0].expected


def test_jacobi():
    rep = verify_jacobi(samples=40, seed=5)
    assert rep.passed and rep.checks == 40


def test_chain_members():
    g = chain_members()
    assert g[0] == list(range(22, 29))
    assert len(g) == 8 and g[-1] == list(range(1, 36))
    assert all(set(a) < set(b) for a, b in zip(g, g[1:]))


def test_solvable_chain():
    rep = verify_solvable_chain()
    assert rep.passed and rep.checks == 9
    assert "G1 is abelian" in rep.notes


def test_chain_violation_detected():
    entries = dict(load_appendix_b().entries)
    entries[(22, 23)] = {1: Fraction(1)}
    rep = verify_solvable_chain(StructureTable(entries))
    assert not rep.passed
    wheres = [m.where for m in rep.mismatches]
    assert "G1 abelian: [e22, e23]" in wheres


def test_annihilation_systems():
    g = verify_gamma_annihilation()
    assert g.passed and g.checks == 55
    l = verify_lambda_annihilation()
    assert l.passed and l.checks == 51
    assert verify_lambda_annihilation(extended=True).passed


def test_annihilation_catches_non_invariant():
    ops = load_reduced("gamma")
    g = lambda k: Poly.var(ops["X1"].names, k - 1)
    # g2 is moved by X1 = d/dg2
    assert not ops["X1"](g(2)).is_zero()
    assert ops["X1"](g(4) * g(5)).is_zero()


def test_poly_laurent_arithmetic():
    z = lambda k: Poly43(f"z{k}")
    p = z(3) ** -2 * z(4)
    assert p.diff(2) == z(3) ** -3 * z(4) * -2
    assert (p * z(3) ** 2) == z(4)
    assert Poly43("z1^2 - z1*z1").is_zero()
    assert Poly.parse(Z_VARS, "1/2*z5") == z(5) * Fraction(1, 2)
