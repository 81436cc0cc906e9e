"""Vector fields with polynomial coefficients and the checked-in operator data."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .poly import G_VARS, L_VARS, Poly, Z_VARS

N_OPERATORS = 35


class ChecksumError(ValueError):
    """A data file does not match its recorded checksum."""


@dataclass(frozen=True)
class VectorField:
    """sum_j coeffs[j] d/d(names[j])."""

    id: str = field(compare=False)
    coeffs: tuple = ()

    @property
    def names(self):
        return self.coeffs[0].names

    def __call__(self, P: Poly) -> Poly:
        out = Poly(P.names)
        for j in P.variables():
            a = self.coeffs[j]
            if a:
                out = out + a * P.diff(j)
        return out

    def __add__(self, o):
        return VectorField(f"({self.id}+{o.id})", tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def scale(self, c):
        return VectorField(f"{c}*{self.id}", tuple(a * c for a in self.coeffs))

    def is_zero(self):
        return all(a.is_zero() for a in self.coeffs)

    def nonzero(self):
        """[(1-based position, coefficient)] of the nonzero entries."""
        return [(j + 1, a) for j, a in enumerate(self.coeffs) if a]

    def __str__(self):
        return f"{self.id} = [" + ", ".join(str(a) for a in self.coeffs) + "]"


VectorField43 = VectorField


def commutator(a: VectorField, b: VectorField) -> VectorField:
    """[a, b]_k = a(b_k) - b(a_k)."""
    return VectorField(f"[{a.id},{b.id}]", tuple(a(bk) - b(ak) for ak, bk in zip(a.coeffs, b.coeffs)))


def combination(ops, coeffs, name="v"):
    """sum c_k ops[k] as a vector field."""
    names = ops[0].names
    out = [Poly(names) for _ in ops[0].coeffs]
    for op, c in zip(ops, coeffs):
        if c:
            out = [x + y * c for x, y in zip(out, op.coeffs)]
    return VectorField(name, tuple(out))


# ---------------------------------------------------------------------------
# data files

_CHECKSUM = re.compile(r"^checksum:\s*sha256\s+([0-9a-f]{64})\s*$")


def read_data(name, text=None):
    """Content lines of a data file after verifying its checksum line."""
    if text is None:
        text = resources.files(__package__).joinpath("data", name).read_text()
    lines = text.rstrip("\n").split("\n")
    if not lines or not _CHECKSUM.match(lines[-1]):
        raise ChecksumError(f"{name}: missing checksum line")
    want = _CHECKSUM.match(lines[-1]).group(1)
    got = hashlib.sha256("\n".join(lines[:-1]).encode()).hexdigest()
    if got != want:
        raise ChecksumError(f"{name}: checksum mismatch (recorded {want[:12]}..., actual {got[:12]}...)")
    return [ln for ln in lines[:-1] if ln.strip() and not ln.lstrip().startswith("#")]


def _split_entries(body):
    body = body.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"operator entries must be bracketed: {body[:40]}")
    return [s.strip() for s in body[1:-1].split(",")]


def parse_operators(lines, names):
    """Lines 'label: [entry, ...]' -> list of VectorField."""
    out = []
    for ln in lines:
        label, _, body = ln.partition(":")
        entries = _split_entries(body)
        if len(entries) != len(names):
            raise ValueError(f"{label}: {len(entries)} entries, expected {len(names)}")
        out.append(VectorField(label.strip(), tuple(Poly.parse(names, s) for s in entries)))
    return out


@lru_cache(maxsize=None)
def load_appendix_a():
    """The 35 operators e1..e35 in z1..z43 (X1..X28, then T1..T7)."""
    ops = parse_operators(read_data("operators.txt"), Z_VARS)
    if [op.id for op in ops] != [f"e{k}" for k in range(1, N_OPERATORS + 1)]:
        raise ValueError("operators.txt must list e1..e35 in order")
    return tuple(ops)


def operator_label(k):
    """e_k -> X_k or T_(k-28)."""
    return f"X{k}" if k <= 28 else f"T{k - 28}"


@lru_cache(maxsize=None)
def load_reduced(system):
    """Reduced operators: system 'lambda' (l1..l24) or 'gamma' (g1..g20)."""
    if system == "lambda":
        return {op.id: op for op in parse_operators(read_data("reduced_lambda.txt"), L_VARS)}
    if system == "gamma":
        return {op.id: op for op in parse_operators(read_data("reduced_gamma.txt"), G_VARS)}
    raise ValueError("system must be 'lambda' or 'gamma'")


_BRACKET = re.compile(r"^\[e(\d+),\s*e(\d+)\]\s*=\s*(.+)$")
_TERM = re.compile(r"^([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?e(\d+)$")


class StructureTable:
    """Nonzero brackets [e_i, e_j] = sum c e_k for i < j."""

    def __init__(self, entries):
        self.entries = {k: dict(v) for k, v in entries.items() if v}

    def bracket(self, i, j):
        """{k: c} for [e_i, e_j], any order of i and j."""
        if i == j:
            return {}
        if i < j:
            return dict(self.entries.get((i, j), {}))
        return {k: -c for k, c in self.entries.get((j, i), {}).items()}

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(sorted(self.entries))

    @classmethod
    def parse(cls, lines):
        entries = {}
        for ln in lines:
            m = _BRACKET.match(ln.strip())
            if not m:
                raise ValueError(f"bad structure line: {ln}")
            i, j = int(m.group(1)), int(m.group(2))
            if not i < j:
                raise ValueError(f"structure line needs i < j: {ln}")
            rhs = {}
            for tok in re.findall(r"[+-]?\s*[^+-]+", m.group(3)):
                t = _TERM.match(tok.replace(" ", ""))
                if not t:
                    raise ValueError(f"bad term {tok!r} in: {ln}")
                c = Fraction(t.group(2) or 1) * (-1 if t.group(1) == "-" else 1)
                k = int(t.group(3))
                rhs[k] = rhs.get(k, 0) + c
            entries[(i, j)] = {k: c for k, c in rhs.items() if c}
        return cls(entries)


@lru_cache(maxsize=None)
def load_appendix_b() -> StructureTable:
    return StructureTable.parse(read_data("brackets.txt"))


def format_combination(d):
    if not d:
        return "0"
    parts = []
    for k in sorted(d):
        c = d[k]
        parts.append(("" if c == 1 else "-" if c == -1 else f"{c}*") + f"e{k}")
    return " + ".join(parts).replace("+ -", "- ")
