from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from plasmasym.liecheck.exact import (
    CASES,
    UnknownCaseError,
    dispersion_frequency,
    dispersion_polynomial,
    verify_exact,
)
from plasmasym.symkernel import Expr, Scope, parse_system


@pytest.mark.parametrize("case", sorted(CASES))
def test_case_residuals_vanish(case):
    rep = verify_exact(case)
    assert rep.passed, rep.to_json()
    assert rep.witness() is None


def test_unknown_case():
    with pytest.raises(UnknownCaseError):
        verify_exact("no-such-case")


def _hand_polynomial(alpha, q, omega):
    # expanded by hand: (1 + q^2) Omega - q + alpha q^3
    return (1 + q * q) * omega - q + alpha * q ** 3


@pytest.mark.parametrize("case", ["hm-eq20", "hm-eq21"])
def test_generic_frequency_leaves_dispersion_factor(case):
    rep = verify_exact(case, generic_omega=True)
    assert not rep.passed
    poly = rep.details["dispersion_polynomial"]
    s = Scope()
    for n in ("alpha", "q", "Omega"):
        s.declare(n, "parameter")
    a, q, om = (s.expr(n) for n in ("alpha", "q", "Omega"))
    target = _hand_polynomial(a, q, om)
    assert (poly - target).is_zero() or (poly + target).is_zero()


def test_dispersion_helpers_agree_with_hand_expansion():
    s = Scope()
    for n in ("alpha", "q", "Omega"):
        s.declare(n, "parameter")
    a, q, om = (s.expr(n) for n in ("alpha", "q", "Omega"))
    assert (dispersion_polynomial(a, q, om) - _hand_polynomial(a, q, om)).is_zero()
    root = dispersion_frequency(a, q)
    assert dispersion_polynomial(a, q, root).is_zero()
    # rational spot check: alpha = 1/20, q = 2 gives Omega = 2/5 - 2/25 = 8/25
    spot = dispersion_frequency(Expr.const(Fraction(1, 20)), Expr.const(2))
    assert spot.constant_value() == Fraction(8, 25)


def test_dispersion_numerically_from_profile():
    # plug the closed-form wave into d_t h + d_y(F h) = 0, h = 1/(1 + F - F_yy),
    # with spectral y-derivatives and a centred t-difference (no solver code)
    alpha, beta, q, ny = 0.05, 0.5, 2, 64
    y = 2 * np.pi * np.arange(ny) / ny
    k = np.fft.rfftfreq(ny, 1 / ny)

    def dy(u, n=1):
        return np.fft.irfft((1j * k) ** n * np.fft.rfft(u), ny)

    def residual(Om, t=0.3, dt=1e-5):
        def h(t):
            F = alpha * (1 + beta * np.cos(Om * t + q * y))
            return F, 1 / (1 + F - dy(F, 2))

        (F, h0), (_, hp), (_, hm) = h(t), h(t + dt), h(t - dt)
        return np.max(np.abs((hp - hm) / (2 * dt) + dy(F * h0)))

    Om = q / (1 + q * q) - alpha * q ** 3 / (1 + q * q)
    assert residual(Om) < 1e-8
    assert residual(Om + 0.01) > 1e-4


def test_second_class_ode_text_parses():
    rep = verify_exact("hm-second-class-ode")
    text = rep.details["ode_dsl"]
    lines = [l for l in text.splitlines() if not l.startswith("eq:")]
    scope_text = "\n".join(lines) + "\ndependent Z\neq: Z = 0\n"
    parse_system(scope_text)  # declarations are well-formed
    assert text.count("eq:") == 2
