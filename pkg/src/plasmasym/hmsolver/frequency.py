"""Frequency estimation from a complex modal time series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FrequencyError(ValueError):
    pass


@dataclass(frozen=True)
class FrequencyEstimate:
    omega: float
    stderr: float  # standard error of the fitted slope
    periods: float

    @property
    def relative_uncertainty(self) -> float:
        return self.stderr / abs(self.omega) if self.omega else float("inf")


def measure_frequency(trace, times=None, dt: float | None = None, min_periods: float = 3.0,
                      noise_floor: float = 1e-12) -> FrequencyEstimate:
    """Least-squares phase slope of ``trace`` under the ``exp(-i omega t)`` convention.

    Either ``times`` or a uniform ``dt`` must be given.
    """
    z = np.asarray(trace, dtype=complex)
    if z.ndim != 1 or z.size < 4:
        raise FrequencyError("need a one-dimensional trace with at least 4 samples")
    t = np.asarray(times, dtype=float) if times is not None else np.arange(z.size) * float(dt)
    amp = np.abs(z)
    scale = max(float(np.max(amp)), 1e-300)
    if np.std(z) <= noise_floor * scale or np.min(amp) <= noise_floor * scale:
        raise FrequencyError("amplitude below noise floor")
    phase = np.unwrap(np.angle(z))
    A = np.vstack([t, np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(A, phase, rcond=None)
    slope = coef[0]
    resid = phase - A @ coef
    dof = max(t.size - 2, 1)
    sxx = float(np.sum((t - t.mean()) ** 2))
    stderr = float(np.sqrt(np.sum(resid ** 2) / dof / sxx)) if sxx > 0 else float("inf")
    omega = -float(slope)
    periods = abs(omega) * (t[-1] - t[0]) / (2 * np.pi)
    if periods < min_periods:
        raise FrequencyError(f"trace spans {periods:.2f} periods, need at least {min_periods:g}")
    return FrequencyEstimate(omega, stderr, periods)
