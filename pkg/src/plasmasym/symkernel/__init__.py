"""Exact symbolic kernel: expressions, DSL, calculus and rewrite systems."""

from .calculus import canonicalize, differentiate, is_zero, jet_partial, max_order, total_derivative
from .dsl import (
    DslError,
    DslSyntaxError,
    ExponentError,
    Scope,
    UndeclaredIdentifierError,
    parse_expression,
    to_dsl,
)
from .expr import ONE, ZERO, Atom, Deriv, Expr, Func, Sym, Trig, cos, sin
from .system import (
    PdeSystem,
    RewriteBudgetError,
    Rule,
    RuleError,
    RuleSet,
    parse_side_conditions,
    parse_system,
    substitute,
)

__all__ = [
    "Atom", "Deriv", "DslError", "DslSyntaxError", "ExponentError", "Expr", "Func", "ONE",
    "PdeSystem", "RewriteBudgetError", "Rule", "RuleError", "RuleSet", "Scope", "Sym", "Trig",
    "UndeclaredIdentifierError", "ZERO", "canonicalize", "cos", "differentiate", "is_zero",
    "jet_partial", "max_order", "parse_expression", "parse_side_conditions", "parse_system",
    "sin", "substitute", "to_dsl", "total_derivative",
]
