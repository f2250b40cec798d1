from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from plasmasym.vlasov import (
    CflError,
    HistoryError,
    NeutralityError,
    PhaseSpaceGrid,
    SpeciesSpec,
    TransformError,
    ampere_series,
    apply_finite_transform,
    initial_state,
    moment_residual,
    moments,
    poisson_field,
    run,
    spline_shift,
    step,
    transform_history,
    undershoot,
)


def electrons(amplitude=0.0, **kw):
    return SpeciesSpec.electrons({"kind": "maxwellian", "amplitude": amplitude, **kw})


@pytest.fixture
def grid():
    return PhaseSpaceGrid(4 * math.pi, 6.0, 32, 64)


# ---------------------------------------------------------------- spline


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5, allow_nan=False), st.integers(0, 2 ** 31))
def test_spline_shift_matches_scipy(shift, seed):
    f = np.random.default_rng(seed).random(24)
    ref = ndimage.shift(f, shift, order=3, mode="grid-wrap")
    assert np.max(np.abs(spline_shift(f, shift) - ref)) < 1e-12


def test_spline_shift_per_line_and_mass():
    rng = np.random.default_rng(1)
    f = rng.random((16, 10))
    shifts = rng.uniform(-2, 2, 10)
    out = spline_shift(f, shifts, axis=0)
    for j in range(10):
        ref = ndimage.shift(f[:, j], shifts[j], order=3, mode="grid-wrap")
        assert np.allclose(out[:, j], ref, atol=1e-13)
    assert out.sum() == pytest.approx(f.sum(), rel=1e-14)


def test_integer_shift_is_roll():
    f = np.random.default_rng(2).random(20)
    assert np.allclose(spline_shift(f, 3.0), np.roll(f, 3), atol=1e-13)


# ---------------------------------------------------------------- state


def test_species_exact_parameters():
    s = SpeciesSpec.from_dict({"name": "alpha", "e": 2, "m": "4"})
    assert s.qm_ratio == Fraction(1, 2)
    d = SpeciesSpec.from_dict({"name": "d", "e": 1, "m": 2})
    assert s.qm_ratio == d.qm_ratio
    assert SpeciesSpec.from_dict(s.to_dict()) == s
    with pytest.raises(ValueError):
        SpeciesSpec("bad", 1, 0)


def test_grid_validation():
    with pytest.raises(ValueError):
        PhaseSpaceGrid(1.0, 1.0, 2, 16)
    g = PhaseSpaceGrid(2.0, 3.0, 8, 12)
    assert g.v[0] == pytest.approx(-3 + 0.25) and g.v[-1] == pytest.approx(3 - 0.25)


def test_maxwellian_moments(grid):
    g = PhaseSpaceGrid(grid.L, 9.0, 16, 256)
    st_ = initial_state(g, [SpeciesSpec.electrons({"kind": "maxwellian", "density": 2.0, "vth": 1.3,
                                                    "drift": 0.4})])
    M = moments(st_, 0, N=1)
    assert np.allclose(M[0], 2.0, rtol=1e-12)
    assert np.allclose(M[1], 2.0 * 0.4, rtol=1e-12)
    assert np.allclose(M[2], 2.0 * (1.3 ** 2 + 0.4 ** 2), rtol=1e-12)


def test_initial_state_neutral_and_gauss(grid):
    s = initial_state(grid, [electrons(0.1)])
    assert s.background == pytest.approx(1.0, rel=1e-8)  # tail beyond |v| = 6 is lost
    assert abs(np.mean(s.charge_density())) < 1e-13
    k = grid.kx
    dEdx = np.fft.irfft(1j * k * np.fft.rfft(s.E), grid.nx)
    assert np.max(np.abs(dEdx - s.charge_density())) < 1e-12


def test_poisson_oracle(grid):
    x = grid.x
    rho = np.cos(2 * np.pi * 3 * x / grid.L)
    E = poisson_field(grid, rho + 5.0)  # mean discarded
    assert np.allclose(E, grid.L / (6 * np.pi) * np.sin(2 * np.pi * 3 * x / grid.L), atol=1e-12)


# ---------------------------------------------------------------- stepping


def test_run_history_sampling(grid):
    s = initial_state(grid, [electrons(0.01)])
    hist = run(s, 0.1, 10, stride=5)
    assert [round(h.time, 12) for h in hist] == [0.0, 0.5, 1.0]


def _energy_drift(grid, dt, t_end=10.0):
    s = initial_state(grid, [electrons(0.05)])
    hist = run(s, dt, round(t_end / dt), stride=10)
    e0 = hist[0].total_energy()
    return hist, max(abs(h.total_energy() - e0) for h in hist) / e0


def test_mass_and_energy_conserved(grid):
    hist, drift = _energy_drift(grid, 0.02)
    m0 = hist[0].mass(0)
    assert max(abs(h.mass(0) - m0) for h in hist) < 1e-12 * m0
    assert drift < 1e-6


def test_energy_error_second_order(grid):
    _, d1 = _energy_drift(grid, 0.05)
    _, d2 = _energy_drift(grid, 0.025)
    assert d1 / d2 == pytest.approx(4.0, rel=0.15)


def test_landau_damping_rate():
    # k = 0.5, vth = 1: omega = 1.4156, gamma = -0.1533 (linear theory)
    g = PhaseSpaceGrid(4 * math.pi, 6.0, 32, 128)
    s = initial_state(g, [electrons(0.01)])
    dt = 0.05
    amp, times = [], []
    for n in range(500):
        s = step(s, dt)
        amp.append(np.abs(np.fft.rfft(s.E)[1]))
        times.append(s.time)
    amp, times = np.array(amp), np.array(times)
    peaks = [i for i in range(1, len(amp) - 1) if amp[i] > amp[i - 1] and amp[i] >= amp[i + 1]]
    rate = np.polyfit(times[peaks], np.log(amp[peaks]), 1)[0]
    assert rate == pytest.approx(-0.1533, rel=0.05)
    omega = math.pi / np.mean(np.diff(times[peaks]))
    assert omega == pytest.approx(1.4156, rel=0.03)


def test_uniform_field_oscillates_at_plasma_frequency(grid):
    s = initial_state(grid, [electrons()], mean_field=0.1)
    hist = run(s, 0.01, 314, stride=314)  # half a period: E -> -E
    assert np.mean(hist[-1].E) == pytest.approx(-0.1 * math.cos(0.0016), abs=2e-4)


def test_cfl_bound(grid):
    s = initial_state(grid, [electrons()], mean_field=50.0)
    with pytest.raises(CflError):
        step(s, 0.1)


def test_non_neutral_state_rejected(grid):
    s = initial_state(grid, [electrons(0.01)])
    with pytest.raises(NeutralityError):
        step(replace(s, background=2.0), 0.01)


# ---------------------------------------------------------------- diagnostics


def test_moment_residual_requires_history(grid):
    s = initial_state(grid, [electrons(0.01)])
    with pytest.raises(HistoryError):
        moment_residual([s, s])


def test_moment_residual_small_and_convergent(grid):
    s = initial_state(grid, [electrons(0.05)])
    hist = run(s, 0.05, 80)
    coarse = moment_residual(hist[::4], N=2)
    fine = moment_residual(hist[::2], N=2)
    assert coarse["gauss"] < 1e-10
    # centred time differences: halving the sample spacing cuts the rows ~4x
    for row in ("k0", "k1", "k2", "ampere"):
        assert fine[row] < coarse[row] / 3


# ---------------------------------------------------------------- transforms


def test_translation_by_whole_cells(grid):
    s = initial_state(grid, [electrons(0.1)])
    t = apply_finite_transform(s, "X2", 3 * grid.dx)
    assert np.allclose(t.f[0], np.roll(s.f[0], 3, axis=0), atol=1e-13)
    assert np.allclose(t.E, np.roll(s.E, 3), atol=1e-13)


def test_scaling_transform(grid):
    s = initial_state(grid, [electrons(0.1)])
    lam = math.exp(0.1)
    t = apply_finite_transform(s, "X3", 0.1)
    assert t.grid.L == pytest.approx(grid.L * lam)
    assert t.mass(0) == pytest.approx(s.mass(0) * lam, rel=1e-12)
    assert np.allclose(t.E, s.E * lam)


def test_identity_and_errors(grid):
    s = initial_state(grid, [electrons(0.1)])
    same = apply_finite_transform(s, "X5", 0.0)
    assert np.array_equal(same.f[0], s.f[0]) and same.f[0] is not s.f[0]
    with pytest.raises(TransformError):
        apply_finite_transform(s, "X9", 0.1)
    two = initial_state(grid, [electrons(), SpeciesSpec("ions", 1, 100)])
    with pytest.raises(TransformError):
        apply_finite_transform(two, "X5", 0.1)
    narrow = initial_state(PhaseSpaceGrid(grid.L, 5.0, 16, 64), [electrons()])
    with pytest.raises(TransformError, match="boundary"):
        apply_finite_transform(narrow, "X5", 1.0)
    truncated = initial_state(PhaseSpaceGrid(grid.L, 3.0, 16, 32), [electrons()])
    with pytest.raises(TransformError, match="unit background"):
        apply_finite_transform(truncated, "X5", 0.1)


def test_x5_image_of_equilibrium_is_plasma_oscillation(grid):
    s = initial_state(grid, [electrons()])
    eps = 0.1
    img = apply_finite_transform(s, "X5", eps)
    assert np.allclose(img.E, 0.0, atol=1e-14)  # sin(0) = 0
    assert np.mean(img.current(0)) == pytest.approx(eps, rel=1e-6)  # particles drift at +eps
    hist = run(img, 0.01, 157, stride=157)
    assert np.mean(hist[-1].E) == pytest.approx(eps * math.sin(1.57), rel=1e-3)


def test_transform_history_keeps_times(grid):
    s = initial_state(grid, [electrons(0.05)])
    hist = run(s, 0.1, 6, stride=2)
    imgs = transform_history(hist, "X4", 0.05)
    assert [h.time for h in imgs] == [h.time for h in hist]


def test_undershoot_and_ampere_series(grid):
    s = initial_state(grid, [electrons(0.05)])
    assert undershoot(s) == 0.0
    f = s.f[0].copy()
    f[0, 0] = -1e-3 * f.max()
    assert undershoot(replace(s, f=(f,))) == pytest.approx(1e-3)
    hist = run(s, 0.02, 100, stride=5)
    series = ampere_series(hist)
    assert series.shape == (len(hist),)
    # interior samples use centred differences: error ~ (omega h)^2 / 6 relative, h = 0.1
    assert np.max(series[1:-1]) < 1e-2 * np.max(np.abs(s.E))
