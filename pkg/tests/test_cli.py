import io

import pytest

from odeinv.cli import SCHEMA, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def kv(text):
    return dict(line.split(" = ", 1) for line in text.splitlines() if " = " in line)


def test_cubic_betas():
    code, text = run("invariants", "--beta", "q^3")
    assert code == 0
    assert "beta5 = 1/12" in text and "beta6 = 1/3" in text


def test_hyper_cr_flagged():
    code, text = run("--format", "kv", "invariants", "--beta", "q^(3/2)")
    assert code == 0
    d = kv(text)
    assert d["hyper_cr"] == "true"
    assert all(d[f"beta{k}"] == "0" for k in range(1, 12))


def test_out_of_class_exit_code():
    code, text = run("invariants", "--beta", "p*q")
    assert code == 2
    assert "f44 != 0" in text


def test_parse_error_exit_code():
    code, text = run("invariants", "--beta", "q^^2")
    assert code == 1
    assert "position 2" in text


def test_usage_error_exit_code():
    assert run("bogus")[0] == 1
    assert run("transform", "q^3")[0] == 1


def test_kv_header():
    code, text = run("--format", "kv", "--seed", "4", "invariants", "--alpha", "q^3")
    d = kv(text)
    assert d["schema"] == SCHEMA
    assert d["seed"] == "4"
    assert d["alpha3"] == "1/(6*q^2)"
    assert d["exit"] == "0"


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("ODEINV_SEED", "9")
    monkeypatch.setenv("ODEINV_PRECISION", "60")
    d = kv(run("--format", "kv", "invariants", "q^3")[1])
    assert d["seed"] == "9" and d["precision"] == "60"
    # explicit flags win over the environment
    d = kv(run("--format", "kv", "--seed", "2", "invariants", "q^3")[1])
    assert d["seed"] == "2"


def test_equiv_verdict():
    code, text = run("--format", "kv", "equiv", "q^4", "q^3")
    assert code == 0
    d = kv(text)
    assert d["verdict"] == "not-equivalent"
    assert "beta5" in d["witness"]


def test_equiv_family():
    code, text = run("equiv", "--family", "ex3", "--", "-A*x^4*q^4 - 3*q/x")
    assert code == 0
    assert "s = 1/(x^5*q^3)" in text
    assert "mismatch" not in text


def test_equiv_family_mismatch_exit():
    assert run("equiv", "--family", "ex3", "q^3")[0] == 3


def test_transform_known_results():
    code, text = run("transform", "A*x^3*q^4", "--phi", "1/x", "--psi", "y/x", "--inverse-phi", "1/x")
    assert code == 0
    assert "-A*x^4*q^4 - 3*q/x" in text
    code, text = run("transform", "q^3 + y", "--phi", "x", "--psi", "y")
    assert text.strip() == "y''' = y + q^3"


def test_transform_degenerate():
    assert run("transform", "q^3", "--phi", "y", "--psi", "y")[0] == 1


def test_transform_verify():
    code, text = run("--points", "3", "transform", "q^3 + y*q^4", "--phi", "2*x + 1",
                     "--psi", "x + 3*y", "--verify", "3")
    assert code == 0, text


def test_verify_appendix_chain_and_annihilation():
    code, text = run("verify-appendix", "--chain", "--annihilation")
    assert code == 0
    assert "solvable chain: ok" in text
    assert "mismatch" not in text.replace("0 mismatches", "")


def test_examples_subset():
    code, text = run("examples", "--only", "ex1")
    assert code == 0
    assert "Example 1" in text and "FAIL" not in text


@pytest.mark.parametrize("argv", [
    ("--format", "kv", "equiv", "3*q^2/p + A*q^3/p^5", "A*q^3"),
    ("--format", "kv", "invariants", "A*x^3*q^4"),
    ("--format", "kv", "verify-appendix", "--table", "--jacobi-samples", "5"),
])
def test_reports_are_deterministic(argv):
    assert run(*argv) == run(*argv)


def test_examples_kv_keys():
    d = kv(run("--format", "kv", "examples", "--only", "ex1")[1])
    assert d["example1.check1"].startswith("pass: ")
    assert d["exit"] == "0"
