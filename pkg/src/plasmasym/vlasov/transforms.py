"""Finite flows of the kinetic point symmetries applied to numerical states.

    X2: x -> x + eps
    X3: x -> lam x, v -> lam v, E -> lam E, f -> f / lam   (lam = exp(eps))
    X4: x -> x + eps cos t, v -> v - eps sin t, E -> E + eps cos t
    X5: x -> x + eps sin t, v -> v + eps cos t, E -> E + eps sin t

f is carried along (f'(x', v') = f(x, v) apart from the X3 weight); fields
are resampled with the periodic cubic spline.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .spline import spline_shift
from .state import PhaseSpaceState

GENERATORS = ("X2", "X3", "X4", "X5")
SUPPORT_TOLERANCE = 1e-6
EDGE_CELLS = 2


class TransformError(ValueError):
    pass


def _check_support(state: PhaseSpaceState) -> None:
    for s, f in zip(state.species, state.f):
        peak = float(np.max(np.abs(f)))
        if peak == 0:
            continue
        edge = max(float(np.max(np.abs(f[:, :EDGE_CELLS]))), float(np.max(np.abs(f[:, -EDGE_CELLS:]))))
        if edge > SUPPORT_TOLERANCE * peak:
            raise TransformError(f"species {s.name!r}: transformed support reaches the v boundary "
                                 f"({edge / peak:.2e} of peak)")


def _shifted(state: PhaseSpaceState, dx: float, dv: float, de: float) -> PhaseSpaceState:
    g = state.grid
    f = []
    for s, fi in zip(state.species, state.f):
        if dx:
            fi = spline_shift(fi, dx / g.dx, axis=0)
        if dv:
            fi = spline_shift(fi, dv / g.dv, axis=1)
        f.append(fi)
    E = spline_shift(state.E, dx / g.dx) if dx else state.E.copy()
    out = replace(state, f=tuple(f), E=E + de)
    _check_support(out)
    return out


def _require_electron_normalisation(state: PhaseSpaceState, gid: str) -> None:
    if len(state.species) != 1 or state.species[0].qm_ratio != -1:
        raise TransformError(f"{gid} is defined for a single species with e/m = -1 (unit plasma frequency)")
    if not math.isclose(state.background, 1.0, rel_tol=1e-6):
        raise TransformError(f"{gid} assumes unit background density, got {state.background:g}")


def apply_finite_transform(state: PhaseSpaceState, gid: str, eps: float) -> PhaseSpaceState:
    """Image of ``state`` under the flow of ``gid`` at group parameter ``eps``."""
    if gid not in GENERATORS:
        raise TransformError(f"unknown generator {gid!r}; choose from {', '.join(GENERATORS)}")
    if eps == 0:
        return replace(state, f=tuple(f.copy() for f in state.f), E=state.E.copy())
    t = state.time
    if gid == "X2":
        return _shifted(state, eps, 0.0, 0.0)
    if gid == "X3":
        lam = math.exp(eps)
        return replace(state, grid=state.grid.scaled(lam), f=tuple(f / lam for f in state.f),
                       E=state.E * lam)
    _require_electron_normalisation(state, gid)
    if gid == "X4":
        return _shifted(state, eps * math.cos(t), -eps * math.sin(t), eps * math.cos(t))
    return _shifted(state, eps * math.sin(t), eps * math.cos(t), eps * math.sin(t))


def transform_history(history, gid: str, eps: float) -> list[PhaseSpaceState]:
    """Apply the flow to every sampled state (each at its own time)."""
    return [apply_finite_transform(s, gid, eps) for s in history]
