from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from exprgen import SCOPE, build, evaluate, kernel_value, make_scope, random_values, to_text, trees
from plasmasym.symkernel import (
    DslSyntaxError,
    ExponentError,
    Expr,
    PdeSystem,
    RewriteBudgetError,
    RuleError,
    UndeclaredIdentifierError,
    canonicalize,
    cos,
    differentiate,
    is_zero,
    parse_expression,
    parse_side_conditions,
    parse_system,
    sin,
    to_dsl,
    total_derivative,
)

PROPS = settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def P(text):
    return parse_expression(text, SCOPE)


def C(e):
    return canonicalize(e)


def same(a, b) -> bool:
    return C(a).same(C(b))


def built(tree):
    try:
        return build(tree)
    except ZeroDivisionError:
        return None


# ---------------------------------------------------------------- parsing


def test_parse_collects_like_terms():
    assert P("u + u - 2*u").is_zero()
    assert P("a*(u + v) - a*u - a*v").is_zero()
    assert P("(u^2 - v^2)/(u - v)").same(P("u + v"))


def test_parse_rational_literals_exact():
    assert P("1/3 + 1/6").constant_value() == Fraction(1, 2)
    assert P("0.25").constant_value() == Fraction(1, 4)


@pytest.mark.parametrize("text, err", [
    ("u +", DslSyntaxError),
    ("w + u", UndeclaredIdentifierError),
    ("u^(1/2)", ExponentError),
    ("D(u, a)", DslSyntaxError),
    ("(u + v", DslSyntaxError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        P(text)


def test_parse_error_carries_position():
    with pytest.raises(UndeclaredIdentifierError) as info:
        parse_expression("u + zz", SCOPE, line=4, column=1)
    assert info.value.line == 4 and info.value.column == 5


def test_division_by_zero_expression():
    with pytest.raises(DslSyntaxError, match="division by zero"):
        P("u/(v - v)")
    with pytest.raises(ZeroDivisionError):
        P("u") / P("v - v")


def test_printer_is_stable():
    e = P("3*u*D(u,x) - a/2")
    assert to_dsl(e) == to_dsl(P(to_dsl(e)))


# ---------------------------------------------------------------- trig atoms


def test_sin_cos_are_independent_generators():
    # no Pythagorean identity
    assert not P("sin(x)^2 + cos(x)^2 - 1").is_zero()
    assert P("sin(x)*cos(x) - cos(x)*sin(x)").is_zero()


def test_phase_sign_normalised():
    x = SCOPE.expr("x")
    assert sin(-x).same(-sin(x))
    assert cos(-x).same(cos(x))


def test_trig_derivatives():
    e = P("sin(a*x + t)")
    assert same(total_derivative(e, "x"), P("a*cos(a*x + t)"))
    assert same(total_derivative(P("cos(a*x + t)"), "t"), P("-sin(a*x + t)"))


# ---------------------------------------------------------------- derivatives


def test_total_derivative_raises_jet_index():
    assert total_derivative(P("u^2"), "x").same(P("2*u*D(u,x)"))
    assert total_derivative(P("D(u,x)"), "t").same(P("D(u,t,x)"))


def test_mixed_partials_on_cubic():
    e = P("u^3*D(u,x)")
    a = total_derivative(total_derivative(e, "x"), "t")
    b = total_derivative(total_derivative(e, "t"), "x")
    assert same(a, b)
    # hand expansion of d_t d_x (u^3 u_x)
    hand = P("6*u*D(u,t)*D(u,x)^2 + 3*u^2*D(u,t,x)*D(u,x) + 3*u^2*D(u,x)*D(u,t,x) "
             "+ 3*u^2*D(u,t)*D(u,x,x) + u^3*D(u,t,x,x)")
    assert same(a, hand)


def test_parameter_derivative_treats_jet_as_constant():
    a = SCOPE.atom("a")
    assert differentiate(P("a^2*u + D(u,x)"), a).same(P("2*a*u"))


def test_function_atom_chain_rule():
    s = make_scope()
    e = parse_expression("F^2", s)
    d = total_derivative(e, "x")
    assert not d.is_zero()
    assert total_derivative(e, "t").is_zero()


def test_quotient_rule():
    d = total_derivative(P("u/(1 + v)"), "x")
    assert same(d, P("D(u,x)/(1 + v) - u*D(v,x)/(1 + v)^2"))


# ---------------------------------------------------------------- zero test


def test_is_zero_witness():
    ok, w = is_zero(P("u - u"))
    assert ok and w is None
    ok, w = is_zero(P("u*v + 2*u"))
    assert not ok and w is not None and not w.is_zero()


def test_canonicalize_reduces_common_factors():
    # factored vs expanded denominators give the same canonical form
    a = P("u/(v - 3)") + P("v/(x + u)")
    b = P("(u*x + u^2 + v^2 - 3*v)/(x*v - 3*x + u*v - 3*u)")
    assert a == b
    assert C(a).same(C(b))


# ---------------------------------------------------------------- systems


def _heat_scope():
    from plasmasym.symkernel import Scope

    s = Scope()
    s.declare("t", "independent")
    s.declare("x", "independent")
    s.declare("u", "dependent")
    return s


def test_system_rules_and_reduction():
    sys_ = parse_system("independent t x\ndependent u\neq: D(u,t) = D(u,x,x)\n", name="heat")
    assert sys_.order == 2
    r = sys_.reduce(sys_.scope.parse("D(u,t,x) - D(u,x,x,x)"))
    assert r.is_zero()


def test_system_dsl_round_trip():
    text = "independent t x\ndependent u\neq: D(u,t) + u*D(u,x) = 0\n"
    s1 = parse_system(text, name="burgers")
    s2 = parse_system(s1.to_dsl(), name="burgers")
    assert all(a.same(b) for a, b in zip(s1.equations, s2.equations))


def test_side_condition_file():
    s = _heat_scope()
    side = parse_side_conditions("side: D(u,x,x) = 0\n", s)
    assert len(side) == 1 and side[0].same(s.parse("D(u,x,x)"))
    with pytest.raises(DslSyntaxError):
        parse_side_conditions("eq: u = 0\n", s)


def test_inconsistent_solve_rejected():
    with pytest.raises(RuleError):
        parse_system("independent t x\ndependent u\neq: D(u,t) = 0\nsolve: D(u,t) = u\n")


def test_rewrite_budget_exhaustion():
    from plasmasym.symkernel import Rule, RuleSet
    from plasmasym.symkernel.expr import Deriv

    s = _heat_scope()
    rules = RuleSet([Rule(Deriv("u", {"t": 1}), s.parse("D(u,x,x)"))], ["t", "x"], budget=3)
    with pytest.raises(RewriteBudgetError):
        rules.reduce(s.parse("D(u,t,t,t,t) + D(u,t,t,t,x)"))


def test_pde_system_requires_consistent_rules():
    s = _heat_scope()
    with pytest.raises(RuleError):
        PdeSystem(s, [s.parse("D(u,t) - D(u,x,x)")], rules=[(s.parse("D(u,t)"), s.parse("u"))])


# ---------------------------------------------------------------- properties


@PROPS
@given(trees())
def test_canonicalize_idempotent(tree):
    e = built(tree)
    if e is None:
        return
    c = C(e)
    assert C(c).same(c)
    assert c == e


@PROPS
@given(trees())
def test_round_trip(tree):
    e = built(tree)
    if e is None:
        return
    assert P(to_dsl(e)).same(C(e))
    assert P(to_text(tree)).same(C(e))


@PROPS
@given(trees(), st.sampled_from(["t", "x"]), st.sampled_from(["t", "x"]))
def test_mixed_partials_commute(tree, v1, v2):
    e = built(tree)
    if e is None:
        return
    a = total_derivative(total_derivative(e, v1), v2)
    b = total_derivative(total_derivative(e, v2), v1)
    assert same(a, b)


@PROPS
@given(trees(5), trees(5), trees(5))
def test_ring_laws(t1, t2, t3):
    a, b, c = built(t1), built(t2), built(t3)
    if a is None or b is None or c is None:
        return
    assert same(a * (b + c), a * b + a * c)
    assert same((a + b) + c, a + (b + c))
    assert same((a * b) * c, a * (b * c))
    assert same(a + b, b + a) and same(a * b, b * a)
    assert (a - a).is_zero()
    if not a.is_zero():
        assert same(a / a, Expr.const(1))


@PROPS
@given(trees(), st.integers(0, 2 ** 32 - 1))
def test_matches_rational_evaluation(tree, seed):
    e = built(tree)
    if e is None:
        return
    vals = random_values(random.Random(seed))
    try:
        ref = evaluate(tree, vals)
    except ZeroDivisionError:
        return
    assert kernel_value(e, vals) == ref
