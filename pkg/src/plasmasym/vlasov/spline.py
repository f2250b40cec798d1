"""Periodic cubic B-spline interpolation for constant shifts along one axis.

For a shift that is constant along each grid line the interpolant is a
circulant operator, so it is applied exactly in Fourier space: prefilter by
the B-spline symbol (4 + 2 cos theta)/6, then multiply by the shifted kernel.
The zero mode is untouched, hence line sums are conserved to roundoff.
"""

from __future__ import annotations

import numpy as np


def bspline3(t):
    """Centred cubic B-spline."""
    a = np.abs(t)
    return np.where(a < 1, 2.0 / 3.0 - a ** 2 + 0.5 * a ** 3, np.where(a < 2, (2 - a) ** 3 / 6.0, 0.0))


def spline_shift(f: np.ndarray, shift, axis: int = 0) -> np.ndarray:
    """Values of the periodic cubic spline through ``f`` at ``index - shift``.

    ``shift`` is in grid cells, either a scalar or one value per line
    (broadcastable against ``f`` with ``axis`` removed).
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[axis]
    fh = np.fft.rfft(f, axis=axis)
    shape = [1] * f.ndim
    shape[axis] = n // 2 + 1
    theta = (2 * np.pi * np.arange(n // 2 + 1) / n).reshape(shape)
    s = np.expand_dims(np.asarray(shift, dtype=float), axis) if np.ndim(shift) else float(shift)
    p = np.floor(s)
    r = s - p
    kernel = np.zeros(np.broadcast_shapes(theta.shape, np.shape(s)), dtype=complex)
    for m in (-1, 0, 1, 2):
        kernel = kernel + bspline3(m - r) * np.exp(-1j * theta * (m + p))
    symbol = (4 + 2 * np.cos(theta)) / 6.0
    return np.fft.irfft(fh * kernel / symbol, n, axis=axis)
