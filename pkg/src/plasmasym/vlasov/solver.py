"""Strang-split semi-Lagrangian stepping.

Each step: half x-advection, field update, full v-advection, half
x-advection.  The non-uniform part of E comes from Gauss's law; the uniform
part (which Gauss's law cannot see on a periodic domain) follows the
spatially averaged Ampere law dE/dt = -<j>, split symmetrically around the
velocity kick.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .spline import spline_shift
from .state import PhaseSpaceState, check_neutrality, poisson_field

MAX_V_SHIFT_CELLS = 1.0


class VlasovError(RuntimeError):
    pass


class CflError(VlasovError):
    pass


def advect_x(state: PhaseSpaceState, dt: float) -> tuple[np.ndarray, ...]:
    shift = state.grid.v * dt / state.grid.dx  # per v column
    return tuple(spline_shift(f, shift, axis=0) for f in state.f)


def advect_v(state: PhaseSpaceState, E: np.ndarray, dt: float) -> tuple[np.ndarray, ...]:
    out = []
    for s, f in zip(state.species, state.f):
        shift = s.acceleration * E * dt / state.grid.dv  # per x row
        out.append(spline_shift(f, shift, axis=1))
    return tuple(out)


def advection_bound(state: PhaseSpaceState) -> float:
    """Largest dt whose velocity displacement stays within MAX_V_SHIFT_CELLS cells."""
    amax = max(abs(s.acceleration) for s in state.species) * float(np.max(np.abs(state.E)))
    return np.inf if amax == 0 else MAX_V_SHIFT_CELLS * state.grid.dv / amax


def mean_current(state: PhaseSpaceState) -> float:
    return float(np.mean(state.current_density()))


def step(state: PhaseSpaceState, dt: float, check: bool = True) -> PhaseSpaceState:
    if dt > advection_bound(state):
        raise CflError(f"dt = {dt:g} exceeds the advection bound {advection_bound(state):.4g}")
    grid = state.grid
    st = replace(state, f=advect_x(state, 0.5 * dt))
    e_mean = float(np.mean(state.E)) - 0.5 * dt * mean_current(st)
    E = poisson_field(grid, st.charge_density()) + e_mean
    st = replace(st, f=advect_v(st, E, dt))
    e_mean -= 0.5 * dt * mean_current(st)
    st = replace(st, f=advect_x(st, 0.5 * dt))
    E = poisson_field(grid, st.charge_density()) + e_mean
    st = replace(st, E=E, time=state.time + dt)
    if check:
        if not all(np.all(np.isfinite(f)) for f in st.f) or not np.all(np.isfinite(E)):
            raise VlasovError(f"non-finite values at t = {st.time:.6g}")
        check_neutrality(st)
    return st


def run(state: PhaseSpaceState, dt: float, nsteps: int, stride: int = 1, callback=None) -> list[PhaseSpaceState]:
    """Advance ``nsteps`` steps, returning the initial state and every ``stride``-th state."""
    history = [state]
    for n in range(1, nsteps + 1):
        state = step(state, dt)
        if callback is not None:
            callback(state)
        if n % stride == 0 or n == nsteps:
            history.append(state)
    return history
