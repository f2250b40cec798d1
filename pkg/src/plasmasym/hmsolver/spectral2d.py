"""Doubly periodic pseudo-spectral drift-wave solver.

    Psi_t + J(Phi, Psi) = Phi_y,   Psi = Phi - lap Phi,   J(a, b) = a_x b_y - b_x a_y

on [0, 2 pi)^2.  Psi is stored as rfft2 coefficients (x along axis 0, y along
axis 1).  Products are formed on the physical grid; the 2/3 rule removes
aliased modes.  Time stepping is classical RK4.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._rk import rk4
from .reduced import InstabilityError

TWO_PI = 2 * np.pi


class DealiasError(ValueError):
    pass


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if n < 6 or n % 2:
                raise DealiasError(f"grid sizes must be even and at least 6, got {self.nx}x{self.ny}")

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def spectral_shape(self):
        return (self.nx, self.ny // 2 + 1)

    def wavenumbers(self):
        kx = np.fft.fftfreq(self.nx, 1.0 / self.nx)[:, None]
        ky = np.fft.rfftfreq(self.ny, 1.0 / self.ny)[None, :]
        return kx, ky

    def dealias_mask(self) -> np.ndarray:
        kx, ky = self.wavenumbers()
        mask = (np.abs(kx) < self.nx / 3) & (np.abs(ky) < self.ny / 3)
        if mask.all() or not mask[0, 0]:
            raise DealiasError("dealiasing mask is misconfigured")
        return mask

    def half_plane_weights(self) -> np.ndarray:
        """Multiplicity of each rfft2 coefficient in the full spectrum."""
        w = np.full(self.spectral_shape, 2.0)
        w[:, 0] = 1.0
        w[:, -1] = 1.0 if self.ny % 2 == 0 else 2.0
        return w

    def coords(self):
        x = TWO_PI * np.arange(self.nx) / self.nx
        y = TWO_PI * np.arange(self.ny) / self.ny
        return np.meshgrid(x, y, indexing="ij")


@dataclass(frozen=True)
class Spectral2DState:
    grid: Grid2D
    psi_hat: np.ndarray
    time: float = 0.0

    @property
    def phi_hat(self) -> np.ndarray:
        kx, ky = self.grid.wavenumbers()
        return self.psi_hat / (1 + kx ** 2 + ky ** 2)

    def phi(self) -> np.ndarray:
        return np.fft.irfft2(self.phi_hat, self.grid.shape)

    def psi(self) -> np.ndarray:
        return np.fft.irfft2(self.psi_hat, self.grid.shape)


def state_from_phi(grid: Grid2D, phi: np.ndarray, time: float = 0.0, dealias: bool = True) -> Spectral2DState:
    phi = np.asarray(phi, dtype=float)
    if phi.shape != grid.shape:
        raise ValueError(f"field shape {phi.shape} does not match grid {grid.shape}")
    kx, ky = grid.wavenumbers()
    psi_hat = np.fft.rfft2(phi) * (1 + kx ** 2 + ky ** 2)
    if dealias:
        psi_hat = psi_hat * grid.dealias_mask()
    return Spectral2DState(grid, psi_hat, time)


def random_state(grid: Grid2D, amplitude: float = 0.1, seed: int = 0, kmax: int = 8) -> Spectral2DState:
    """Band-limited random Phi with max |Phi| = amplitude."""
    rng = np.random.default_rng(seed)
    kx, ky = grid.wavenumbers()
    band = (np.abs(kx) <= kmax) & (ky <= kmax) & ((kx != 0) | (ky != 0))
    coef = (rng.standard_normal(grid.spectral_shape) + 1j * rng.standard_normal(grid.spectral_shape)) * band
    phi = np.fft.irfft2(coef, grid.shape)
    phi *= amplitude / np.max(np.abs(phi))
    return state_from_phi(grid, phi)


class Hm2DSolver:
    def __init__(self, grid: Grid2D):
        self.grid = grid
        kx, ky = grid.wavenumbers()
        self.ikx = 1j * kx
        self.iky = 1j * ky
        self.inv_helm = 1.0 / (1 + kx ** 2 + ky ** 2)
        self.mask = grid.dealias_mask()

    def rhs(self, psi_hat: np.ndarray) -> np.ndarray:
        shape = self.grid.shape
        phi_hat = psi_hat * self.inv_helm
        phi_x = np.fft.irfft2(self.ikx * phi_hat, shape)
        phi_y = np.fft.irfft2(self.iky * phi_hat, shape)
        psi_x = np.fft.irfft2(self.ikx * psi_hat, shape)
        psi_y = np.fft.irfft2(self.iky * psi_hat, shape)
        jac = np.fft.rfft2(phi_x * psi_y - psi_x * phi_y) * self.mask
        return -jac + self.iky * phi_hat

    def step(self, state: Spectral2DState, dt: float) -> Spectral2DState:
        new = rk4(self.rhs, state.psi_hat * self.mask, dt)
        if not np.all(np.isfinite(new)):
            raise InstabilityError(f"non-finite spectral coefficients at t = {state.time + dt:.6g}")
        return replace(state, psi_hat=new, time=state.time + dt)


def step_2d(state: Spectral2DState, dt: float) -> Spectral2DState:
    return Hm2DSolver(state.grid).step(state, dt)


def hm_invariants(state: Spectral2DState) -> tuple[float, float]:
    """Energy 1/2 int(Phi^2 + |grad Phi|^2) and enstrophy 1/2 int(|grad Phi|^2 + (lap Phi)^2)."""
    g = state.grid
    kx, ky = g.wavenumbers()
    k2 = kx ** 2 + ky ** 2
    amp2 = g.half_plane_weights() * np.abs(state.phi_hat / (g.nx * g.ny)) ** 2
    area = TWO_PI ** 2
    energy = 0.5 * area * float(np.sum((1 + k2) * amp2))
    enstrophy = 0.5 * area * float(np.sum((k2 + k2 ** 2) * amp2))
    return energy, enstrophy


def shear_flow_state(grid: Grid2D, profile=np.cos) -> Spectral2DState:
    """Phi = G(x), independent of y."""
    x, _ = grid.coords()
    return state_from_phi(grid, profile(x))
