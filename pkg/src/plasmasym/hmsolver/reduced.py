"""Reduced one-dimensional drift-wave system in (t, y).

The profile F(t, y) and the vorticity factor G = F - F_yy evolve through the
conservation law for h = 1/(G + 1):

    h_t + (F h)_y = 0.

The state is advanced in h with spectral y-derivatives and RK4; after each
stage G = 1/h - 1 and F = (1 - d_yy)^{-1} G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._rk import rk4
from .frequency import FrequencyEstimate, measure_frequency

SINGULARITY_THRESHOLD = 0.05
CFL_NUMBER = 0.5


class SolverError(RuntimeError):
    """Numerical abort (singularity, instability or a violated step bound)."""


class SingularityError(SolverError):
    pass


class InstabilityError(SolverError):
    pass


class StepBoundError(SolverError):
    pass


@dataclass(frozen=True)
class HmExactParams:
    alpha: float
    beta: float
    q: int

    def __post_init__(self):
        if int(self.q) != self.q:
            raise ValueError("q must be an integer wavenumber on the periodic domain")
        if abs(self.alpha) * (1 + abs(self.beta) * (1 + self.q ** 2)) >= 1:
            raise ValueError("|alpha| (1 + |beta| (1 + q^2)) must stay below 1")

    @property
    def omega(self) -> float:
        return self.q / (1 + self.q ** 2)

    @property
    def delta_omega(self) -> float:
        return -self.alpha * self.q ** 3 / (1 + self.q ** 2)

    @property
    def Omega(self) -> float:
        return self.omega + self.delta_omega

    def profile(self, y, t: float = 0.0):
        """Closed-form F(t, y) of the travelling-wave family."""
        return self.alpha * (1 + self.beta * np.cos(self.Omega * t + self.q * y))


@dataclass(frozen=True)
class ReducedHmState:
    y: np.ndarray
    h: np.ndarray
    F: np.ndarray
    G: np.ndarray
    time: float = 0.0

    @property
    def ny(self) -> int:
        return self.y.size


def _wavenumbers(ny: int) -> np.ndarray:
    return np.fft.rfftfreq(ny, 1.0 / ny)


def _ddy(u: np.ndarray, k: np.ndarray) -> np.ndarray:
    uh = np.fft.rfft(u) * (1j * k)
    if u.size % 2 == 0:
        uh[-1] = 0.0
    return np.fft.irfft(uh, u.size)


def helmholtz_inverse(G: np.ndarray) -> np.ndarray:
    """Solve (1 - d_yy) F = G spectrally."""
    k = _wavenumbers(G.size)
    return np.fft.irfft(np.fft.rfft(G) / (1 + k ** 2), G.size)


def state_from_h(y, h, time) -> ReducedHmState:
    G = 1.0 / h - 1.0
    return ReducedHmState(y, h, helmholtz_inverse(G), G, time)


def seed_exact(params: HmExactParams, ny: int) -> ReducedHmState:
    y = 2 * np.pi * np.arange(ny) / ny
    F = params.profile(y)
    G = params.alpha + params.alpha * params.beta * (1 + params.q ** 2) * np.cos(params.q * y)
    if np.min(G + 1) <= 0:
        raise SingularityError("seeded vorticity factor G + 1 is not positive")
    return ReducedHmState(y, 1.0 / (G + 1.0), F, G, 0.0)


def seed_profile(F: np.ndarray) -> ReducedHmState:
    """State from arbitrary grid values of F on [0, 2 pi)."""
    F = np.asarray(F, dtype=float)
    ny = F.size
    y = 2 * np.pi * np.arange(ny) / ny
    k = _wavenumbers(ny)
    G = np.fft.irfft(np.fft.rfft(F) * (1 + k ** 2), ny)
    if np.min(G + 1) <= 0:
        raise SingularityError("vorticity factor G + 1 is not positive")
    return ReducedHmState(y, 1.0 / (G + 1.0), F, G, 0.0)


def max_stable_dt(state: ReducedHmState) -> float:
    fmax = float(np.max(np.abs(state.F)))
    dy = 2 * np.pi / state.ny
    return math.inf if fmax == 0 else CFL_NUMBER * dy / fmax


def _rhs(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    G = 1.0 / h - 1.0
    F = np.fft.irfft(np.fft.rfft(G) / (1 + k ** 2), h.size)
    return -_ddy(F * h, k)


def _check(state: ReducedHmState) -> None:
    if not (np.all(np.isfinite(state.h)) and np.all(np.isfinite(state.F))):
        raise InstabilityError(f"non-finite values at t = {state.time:.6g}")
    gmin = float(np.min(state.G + 1))
    if gmin < SINGULARITY_THRESHOLD:
        raise SingularityError(f"min(G + 1) = {gmin:.3g} below {SINGULARITY_THRESHOLD} at t = {state.time:.6g}")


def step_reduced(state: ReducedHmState, dt: float) -> ReducedHmState:
    bound = max_stable_dt(state)
    if dt > bound:
        raise StepBoundError(f"dt = {dt:g} exceeds the stability bound {bound:.4g}")
    k = _wavenumbers(state.ny)
    h = rk4(lambda u: _rhs(u, k), state.h, dt)
    if np.any(h <= 0) or not np.all(np.isfinite(h)):
        raise InstabilityError(f"h lost positivity or finiteness at t = {state.time + dt:.6g}")
    new = state_from_h(state.y, h, state.time + dt)
    _check(new)
    return new


def mode_amplitude(state: ReducedHmState, q: int) -> complex:
    """Coefficient of exp(-i q y) in F (the wave travels as exp(-i(Omega t + q y)))."""
    return complex(np.conj(np.fft.rfft(state.F)[q])) / state.ny


def consistency(state: ReducedHmState) -> tuple[float, float]:
    """max|G - (F - F_yy)| and max|h (G + 1) - 1|."""
    k = _wavenumbers(state.ny)
    fyy = np.fft.irfft(-(k ** 2) * np.fft.rfft(state.F), state.ny)
    return (float(np.max(np.abs(state.G - (state.F - fyy)))),
            float(np.max(np.abs(state.h * (state.G + 1) - 1))))


def mass(state: ReducedHmState) -> float:
    return float(np.sum(state.h) * 2 * np.pi / state.ny)


@dataclass
class ReducedRun:
    times: np.ndarray
    modes: np.ndarray
    masses: np.ndarray
    final: ReducedHmState
    max_consistency: tuple[float, float]

    def frequency(self, min_periods: float = 3.0) -> FrequencyEstimate:
        return measure_frequency(self.modes, self.times, min_periods=min_periods)


def run_reduced(state: ReducedHmState, dt: float, t_end: float, q: int, stride: int = 1) -> ReducedRun:
    """Integrate to ``t_end`` recording the mode-q amplitude every ``stride`` steps."""
    nsteps = int(round(t_end / dt))
    times, modes, masses = [state.time], [mode_amplitude(state, q)], [mass(state)]
    worst = consistency(state)
    for n in range(1, nsteps + 1):
        state = step_reduced(state, dt)
        if n % stride == 0 or n == nsteps:
            times.append(state.time)
            modes.append(mode_amplitude(state, q))
            masses.append(mass(state))
            c = consistency(state)
            worst = (max(worst[0], c[0]), max(worst[1], c[1]))
    return ReducedRun(np.array(times), np.array(modes), np.array(masses), state, worst)


def exact_error(state: ReducedHmState, params: HmExactParams) -> float:
    """max|F - F_exact| at the state's time."""
    return float(np.max(np.abs(state.F - params.profile(state.y, state.time))))


def with_time(state: ReducedHmState, time: float) -> ReducedHmState:
    return replace(state, time=time)
