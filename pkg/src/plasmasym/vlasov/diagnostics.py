"""Velocity moments and residuals of the moment hierarchy on sampled histories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import PhaseSpaceState


class HistoryError(ValueError):
    pass


@dataclass(frozen=True)
class MomentVector:
    M: tuple[np.ndarray, ...]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.M[k]

    def __len__(self):
        return len(self.M)


def moments(state: PhaseSpaceState, species: int = 0, N: int = 2) -> MomentVector:
    """M_k(x) = int v^k f dv for k = 0..N+1.

    The v grid is cell-centred and f vanishes at +-V, so the trapezoid rule
    reduces to the plain cell sum.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    v = state.grid.v
    f = state.f[species]
    return MomentVector(tuple((f @ v ** k) * state.grid.dv for k in range(N + 2)))


def _ddx(u: np.ndarray, state: PhaseSpaceState) -> np.ndarray:
    k = state.grid.kx
    uh = np.fft.rfft(u) * (1j * k)
    if u.size % 2 == 0:
        uh[-1] = 0.0
    return np.fft.irfft(uh, u.size)


def moment_residual(history, N: int = 2, species: int = 0) -> dict[str, float]:
    """Max-norm residuals of the hierarchy rows k = 0..N and both field rows.

    Row k:  M_k,t + M_{k+1},x - (e/m) k E M_{k-1};  Gauss:  E_x - rho;
    Ampere:  E_t + j.  Time derivatives are centred differences, so the
    history must be uniformly sampled with at least three entries.
    """
    history = list(history)
    if len(history) < 3:
        raise HistoryError("moment residuals need at least three samples")
    times = np.array([s.time for s in history])
    steps = np.diff(times)
    if np.ptp(steps) > 1e-9 * max(abs(steps[0]), 1e-300) or steps[0] <= 0:
        raise HistoryError("history must be uniformly sampled in time")
    dt = steps[0]
    acc = history[0].species[species].acceleration
    Ms = [moments(s, species, N) for s in history]
    out = {f"k{k}": 0.0 for k in range(N + 1)}
    out["gauss"] = 0.0
    out["ampere"] = 0.0
    for i, s in enumerate(history):
        out["gauss"] = max(out["gauss"], float(np.max(np.abs(_ddx(s.E, s) - s.charge_density()))))
        if i == 0 or i == len(history) - 1:
            continue
        prev, nxt = history[i - 1], history[i + 1]
        for k in range(N + 1):
            dmt = (Ms[i + 1][k] - Ms[i - 1][k]) / (2 * dt)
            row = dmt + _ddx(Ms[i][k + 1], s)
            if k:
                row = row - acc * k * s.E * Ms[i][k - 1]
            out[f"k{k}"] = max(out[f"k{k}"], float(np.max(np.abs(row))))
        dEt = (nxt.E - prev.E) / (2 * dt)
        out["ampere"] = max(out["ampere"], float(np.max(np.abs(dEt + s.current_density()))))
    return out


UNDERSHOOT_TOLERANCE = 1e-6


def undershoot(state: PhaseSpaceState, species: int = 0) -> float:
    """Most negative value of f relative to its peak (0 when f >= 0)."""
    f = state.f[species]
    peak = float(np.max(np.abs(f)))
    return 0.0 if peak == 0 else max(0.0, -float(np.min(f))) / peak


def ampere_series(history) -> np.ndarray:
    """Per-sample ||E_t + j||_inf with E_t from np.gradient over the sampled times."""
    history = list(history)
    if len(history) < 2:
        raise HistoryError("the Ampere residual needs at least two samples")
    times = np.array([s.time for s in history])
    Et = np.gradient(np.array([s.E for s in history]), times, axis=0)
    return np.array([float(np.max(np.abs(Et[i] + s.current_density()))) for i, s in enumerate(history)])
