"""Differentiation, zero testing and jet-space partial derivatives."""

from __future__ import annotations

from .expr import (
    INDEPENDENT,
    ONE,
    Atom,
    Deriv,
    Expr,
    Sym,
    apply_derivation,
    derivation,
    mono_key,
    p_exact_div,
    p_gcd,
)


def total_derivative_map(var: str):
    """Atom derivation of the total derivative D_var (fields depend on the independents)."""

    def base(a: Atom):
        if isinstance(a, Sym):
            return ONE if a.name == var else None
        if isinstance(a, Deriv):
            return Expr.atom(a.raised(var))
        return None

    return derivation(base)


def total_derivative(e: Expr, var, system=None) -> Expr:
    """D_var e.  When ``system`` is given, ``var`` must be one of its independents."""
    name = var.name if isinstance(var, Sym) else var
    if system is not None and name not in system.independents:
        raise ValueError(f"{name!r} is not an independent variable of the system")
    return apply_derivation(Expr.coerce(e), total_derivative_map(name))


def differentiate(e: Expr, s: Sym) -> Expr:
    """Partial derivative with respect to an independent variable or a parameter.

    For an independent variable this is the total derivative (jet coordinates
    gain an index); for a parameter, jet coordinates are constants.
    """
    if s.kind == INDEPENDENT:
        return total_derivative(e, s.name)

    def base(a: Atom):
        if isinstance(a, Sym) and a.name == s.name:
            return ONE
        return None

    return apply_derivation(Expr.coerce(e), derivation(base))


def jet_partial(e: Expr, target: Atom) -> Expr:
    """Partial derivative with respect to one jet coordinate or base variable."""

    def base(a: Atom):
        return ONE if a == target else None

    return apply_derivation(Expr.coerce(e), derivation(base))


def is_zero(e: Expr) -> tuple[bool, Expr | None]:
    """Exact zero test; on failure, one nonzero canonical numerator monomial."""
    e = Expr.coerce(e)
    if e.is_zero():
        return True, None
    e = canonicalize(e)
    m = max(e.num, key=mono_key)
    return False, Expr({m: e.num[m]})


def canonicalize(e: Expr) -> Expr:
    """Unique normal form: numerator and denominator coprime, denominator
    split into atom powers times one monic polynomial.

    Arithmetic keeps denominators as products of whatever factors arose, which
    is exact but not unique; this reduces by a true polynomial gcd.
    """
    e = Expr.coerce(e)
    num = Expr(dict(e.num))
    if not e.den:
        return num
    den = e.denominator().num
    g = p_gcd(e.num, den)
    if len(g) > 1 or any(m for m in g):
        num = Expr(p_exact_div(e.num, g))
        den = p_exact_div(den, g)
    return num / Expr(den)


def max_order(exprs) -> int:
    order = 0
    for e in exprs:
        for a in e.atoms():
            if isinstance(a, Deriv):
                order = max(order, a.order)
    return order
