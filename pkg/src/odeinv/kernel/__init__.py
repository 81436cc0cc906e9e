"""Symbolic expression kernel."""

from .evaluate import (DEFAULT_PRECISION, DivisionByZero, DomainViolation,
                       EvaluationError, UnboundSymbol, evaluate)
from .expr import (ONE, VARIABLES, ZERO, Add, Const, Expr, Func, Mul, P, Pow,
                   Q, Sym, X, Y, add, div, exp, ln, mul, neg, power, sub,
                   symbols, sympify)
from .ops import (Constraint, Outcome, Policy, ZeroDecision, differentiate,
                  domain_constraints, equal, equals_zero, frac_equals_zero,
                  point_values, replace, sample_points, simplify,
                  simplify_with_domain, substitute)
from .parser import ParseError, parse
from .printer import to_str
from .ratfunc import Field, Frac, field_for, merge_fields, to_frac

__all__ = [
    "Add", "Const", "Constraint", "DEFAULT_PRECISION", "DivisionByZero",
    "DomainViolation", "EvaluationError", "Expr", "Field", "Frac", "Func",
    "Mul", "ONE", "Outcome", "P", "ParseError", "Policy", "Pow", "Q", "Sym",
    "UnboundSymbol", "VARIABLES", "X", "Y", "ZERO", "ZeroDecision", "add",
    "differentiate", "div", "domain_constraints", "equal", "equals_zero",
    "evaluate", "exp", "field_for", "frac_equals_zero", "ln", "merge_fields",
    "mul", "neg", "parse", "point_values", "power", "replace",
    "sample_points", "simplify", "simplify_with_domain", "sub", "substitute",
    "symbols", "sympify", "to_frac", "to_str",
]
