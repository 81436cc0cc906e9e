"""Command-line front end: ``odeinv <command> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 equation outside the
invariant class, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .kernel import Outcome, ParseError, Policy

SCHEMA = "odeinv-report/1"
EXIT_OK, EXIT_USAGE, EXIT_CLASS, EXIT_MISMATCH = 0, 1, 2, 3


class Report:
    """Ordered key/value report; text and kv renderings."""

    def __init__(self, command, args):
        self.items = [("schema", SCHEMA), ("version", __version__), ("command", command),
                      ("seed", args.seed), ("points", args.points),
                      ("tolerance", args.tolerance), ("precision", args.precision)]
        self.text = []
        self.status = EXIT_OK
        self.timings = []

    def put(self, key, value):
        self.items.append((key, _fmt(value)))

    def say(self, line=""):
        self.text.append(line)

    def time(self, label, seconds):
        self.timings.append((label, seconds))

    def render(self, fmt, timings=False):
        items = list(self.items) + [("exit", self.status)]
        if timings:
            items += [(f"time.{k}", f"{v:.3f}") for k, v in self.timings]
        if fmt == "kv":
            return "\n".join(f"{k} = {v}" for k, v in items) + "\n"
        out = list(self.text)
        if timings:
            out += [f"{k}: {v:.2f} s" for k, v in self.timings]
        return "\n".join(out) + "\n"


def _fmt(v):
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Outcome):
        return str(v)
    return str(v)


def _env(name, cast, default):
    v = os.environ.get(name)
    return cast(v) if v not in (None, "") else default


def policy_of(args):
    return Policy(points=args.points, tolerance=args.tolerance, seed=args.seed,
                  precision=args.precision)


# ---------------------------------------------------------------------------
# commands

def cmd_invariants(args, rep):
    from .invariants import (OutOfClass, alphas, betas, classify_constancy,
                             gamma_invariants, lambda_invariants)
    from .jet import OdeSpec
    policy = policy_of(args)
    ode = OdeSpec(args.f)
    rep.put("ode", ode.f)
    rep.say(f"y''' = {ode.f}")
    kind = "alpha" if args.alpha else "beta"
    rep.put("group", kind)
    try:
        inv = alphas(ode, policy) if args.alpha else betas(ode, policy)
    except OutOfClass as exc:
        rep.put("error", "out-of-class")
        rep.put("precondition", exc.precondition)
        rep.say(f"error: outside the invariant class: {exc}")
        rep.status = EXIT_CLASS
        return
    if args.show_lambda or args.show_gamma:
        lam = lambda_invariants(ode.table())
        if args.show_lambda:
            for i, e in lam.items():
                rep.put(f"lambda{i}", e)
                rep.say(f"lambda{i} = {e}")
        if args.show_gamma:
            for i, e in gamma_invariants(lam, policy).items():
                rep.put(f"gamma{i}", e)
                rep.say(f"gamma{i} = {e}")
    cons = classify_constancy(inv, ode, policy)
    for i, e in inv.items():
        name = inv.name(i)
        ent = cons[name]
        rep.put(name, e)
        rep.put(f"{name}.status", ent.status)
        if ent.witness:
            rep.put(f"{name}.witness", ", ".join(f"{v}={_fmt(ent.witness[v])}" for v in sorted(ent.witness)))
        rep.say(f"{name} = {e}    [{ent.status}]")
    if kind == "beta":
        hyper = all(cons[inv.name(i)].is_constant and inv.frac(i).is_zero() for i in inv.indices)
        rep.put("hyper_cr", hyper)
        if hyper:
            rep.say("all betas vanish: hyper-CR case")


def cmd_equiv(args, rep):
    from .corpus import ex3_family, ex4_family
    from .equivalence import compare, match_transformed_signature, signature
    policy = policy_of(args)
    if args.family:
        fam = {"ex3": ex3_family, "ex4": ex4_family}[args.family]()
        m = match_transformed_signature(args.f1, fam, policy)
        rep.put("family", fam.name)
        for s, v in m.aux.items():
            rep.put(f"aux.{s}", v)
        for n, e in m.entries.items():
            rep.put(f"match.{n}", "yes" if e.outcome is Outcome.YES else "no")
        rep.put("match", m.passed)
        rep.text += m.lines()
        rep.say(f"match: {'yes' if m.passed else 'no'}")
        if not m.passed:
            rep.status = EXIT_MISMATCH
        return
    if not args.f2:
        raise UsageError("equiv needs two equations or --family")
    a = signature(args.f1, args.degree, policy)
    b = signature(args.f2, args.degree, policy)
    for tag, sig in (("first", a), ("second", b)):
        rep.say(f"[{tag}]")
        rep.text += [f"  {ln}" for ln in sig.lines()]
        rep.put(f"{tag}.ode", sig.ode.f)
        rep.put(f"{tag}.in_class", sig.in_class)
        for k, v in sig.constants().items():
            rep.put(f"{tag}.beta{k}", v)
        for k in sig.non_constant():
            rep.put(f"{tag}.beta{k}.status", sig.status(k))
        for j, r in enumerate(sig.relations, 1):
            rep.put(f"{tag}.relation{j}", r)
    v = compare(a, b, policy)
    rep.put("verdict", v.outcome)
    if v.is_not_equivalent:
        rep.put("witness", v.witness)
    rep.text += v.lines()


def cmd_transform(args, rep):
    from .transforms import (FiberTransform, invariance_check, pushforward_ode,
                             transport_ode)
    inverse = None
    if args.inverse_phi:
        inverse = (args.inverse_phi, args.inverse_psi)
    t = FiberTransform(args.phi, args.psi, inverse=inverse)
    rep.put("transform", t)
    if inverse is not None:
        c1, c2 = t.verify_inverse(policy=policy_of(args))
        ok = c1.outcome is Outcome.YES and c2.outcome is Outcome.YES
        rep.put("inverse_verified", ok)
        if not ok:
            rep.say(f"error: supplied inverse does not invert {t}")
            rep.status = EXIT_USAGE
            return
    out = transport_ode(args.f, t) if args.covariant else pushforward_ode(args.f, t)
    rep.put("mode", "covariant" if args.covariant else "forward")
    rep.put("result", out.f)
    rep.say(f"y''' = {out.f}")
    if args.verify:
        r = invariance_check(args.f, t, n_points=args.verify, tolerance=args.tolerance,
                             seed=args.seed, prec=args.precision)
        rep.put("verify.points", r.points)
        rep.put("verify.exact", r.exact)
        rep.put("verify.passed", r.passed)
        rep.say(f"invariance on {r.points} points: {'ok' if r.passed else 'FAILED'}")
        for e in r.failures():
            rep.put(f"verify.{e.name}", e.detail)
        if not r.passed:
            rep.status = EXIT_MISMATCH


def cmd_verify_appendix(args, rep):
    from .lie import (verify_commutator_table, verify_gamma_annihilation,
                      verify_jacobi, verify_lambda_annihilation,
                      verify_solvable_chain)
    every = not (args.table or args.chain or args.annihilation)
    jobs = []
    if args.table or every:
        jobs.append(("table", lambda: verify_commutator_table(args.workers)))
        if args.jacobi_samples:
            jobs.append(("jacobi", lambda: verify_jacobi(args.jacobi_samples, args.seed)))
    if args.chain or every:
        jobs.append(("chain", verify_solvable_chain))
    if args.annihilation or every:
        jobs.append(("beta_annihilation", verify_gamma_annihilation))
        jobs.append(("alpha_annihilation", verify_lambda_annihilation))
    for key, fn in jobs:
        t0 = time.perf_counter()
        r = fn()
        rep.time(key, time.perf_counter() - t0)
        rep.put(f"{key}.checks", r.checks)
        rep.put(f"{key}.mismatches", len(r.mismatches))
        for j, m in enumerate(r.mismatches, 1):
            rep.put(f"{key}.mismatch{j}", m)
        rep.text += r.lines()
        if not r.passed:
            rep.status = EXIT_MISMATCH


def cmd_examples(args, rep):
    from .corpus import run_examples
    for r in run_examples(args.only, policy_of(args)):
        key = "example" + r.name.split()[1]
        rep.time(key, r.seconds)
        for j, c in enumerate(r.checks, 1):
            rep.put(f"{key}.check{j}", ("pass: " if c.passed else "FAIL: ") + c.label)
        for n in r.notes:
            rep.put(f"{key}.note", n)
        rep.text += r.lines()
        if not r.passed:
            rep.status = EXIT_MISMATCH


# ---------------------------------------------------------------------------
# argument parsing

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="odeinv", description="Invariants of y''' = f(x, y, y', y'') "
                                            "under fiber-preserving transformations.")
    p.add_argument("--version", action="version", version=f"odeinv {__version__}")
    p.add_argument("--seed", type=int, default=_env("ODEINV_SEED", int, 0))
    p.add_argument("--points", type=int, default=_env("ODEINV_POINTS", int, 25))
    p.add_argument("--tolerance", type=float, default=_env("ODEINV_TOLERANCE", float, 1e-25))
    p.add_argument("--precision", type=int, default=_env("ODEINV_PRECISION", int, 50))
    p.add_argument("--format", choices=("text", "kv"), default="text")
    p.add_argument("--timings", action="store_true", help="append wall-clock timings")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("invariants", help="alpha or beta invariants of an equation")
    s.add_argument("f")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--beta", action="store_true", help="fiber-preserving invariants (default)")
    g.add_argument("--alpha", action="store_true", help="invariants of the x-fixing subgroup")
    s.add_argument("--show-lambda", action="store_true")
    s.add_argument("--show-gamma", action="store_true")
    s.set_defaults(run=cmd_invariants)

    s = sub.add_parser("equiv", help="necessary conditions for equivalence")
    s.add_argument("f1")
    s.add_argument("f2", nargs="?")
    s.add_argument("--family", choices=("ex3", "ex4"),
                   help="match f1 against a parametrized reference family instead")
    s.add_argument("--degree", type=int, default=2, help="relation degree bound")
    s.set_defaults(run=cmd_equiv)

    s = sub.add_parser("transform", help="transform an equation")
    s.add_argument("f")
    s.add_argument("--phi", required=True)
    s.add_argument("--psi", required=True)
    s.add_argument("--inverse-phi")
    s.add_argument("--inverse-psi")
    s.add_argument("--covariant", action="store_true",
                   help="treat f as unbarred and return the barred equation")
    s.add_argument("--forward", action="store_true",
                   help="treat f as barred and return the unbarred equation (default)")
    s.add_argument("--verify", type=int, default=0, metavar="N",
                   help="check beta invariance on N jet points")
    s.set_defaults(run=cmd_transform)

    s = sub.add_parser("verify-appendix", help="check the operator algebra data")
    s.add_argument("--table", action="store_true")
    s.add_argument("--chain", action="store_true")
    s.add_argument("--annihilation", action="store_true")
    s.add_argument("--jacobi-samples", type=int, default=200)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(run=cmd_verify_appendix)

    s = sub.add_parser("examples", help="replay the worked examples")
    s.add_argument("--only", action="append", choices=("ex1", "ex2", "ex3", "ex4"))
    s.set_defaults(run=cmd_examples)
    return p


def main(argv=None, out=None):
    from .invariants import OutOfClass
    from .lie.fields import ChecksumError
    from .transforms import DegenerateTransform, NotInvertible
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = Report(args.command, args)
    try:
        args.run(args, rep)
    except (ParseError, UsageError, ValueError) as exc:
        if isinstance(exc, OutOfClass):
            rep.put("error", "out-of-class")
            rep.put("precondition", exc.precondition)
            rep.say(f"error: outside the invariant class: {exc}")
            rep.status = EXIT_CLASS
        elif isinstance(exc, ChecksumError):
            rep.put("error", str(exc))
            rep.say(f"error: {exc}")
            rep.status = EXIT_MISMATCH
        else:
            kind = ("parse" if isinstance(exc, ParseError) else
                    "transform" if isinstance(exc, (DegenerateTransform, NotInvertible)) else "usage")
            rep.put("error", f"{kind}: {exc}")
            rep.say(f"error: {exc}")
            rep.status = EXIT_USAGE
    out.write(rep.render(args.format, args.timings))
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
