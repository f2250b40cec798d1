"""Species, phase-space grids and states for the 1D1V electrostatic model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np


class NeutralityError(ValueError):
    pass


def exact(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float literal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class SpeciesSpec:
    """One plasma component; charge and mass are stored exactly."""

    name: str
    charge: Fraction
    mass: Fraction
    profile: dict = field(default_factory=lambda: {"kind": "maxwellian"})

    def __post_init__(self):
        object.__setattr__(self, "charge", exact(self.charge))
        object.__setattr__(self, "mass", exact(self.mass))
        if self.mass <= 0:
            raise ValueError(f"species {self.name!r}: mass must be positive")

    @property
    def qm_ratio(self) -> Fraction:
        return self.charge / self.mass

    @property
    def acceleration(self) -> float:
        return float(self.qm_ratio)

    @classmethod
    def electrons(cls, profile: dict | None = None) -> SpeciesSpec:
        return cls("electrons", Fraction(-1), Fraction(1), profile or {"kind": "maxwellian"})

    @classmethod
    def from_dict(cls, doc: dict) -> SpeciesSpec:
        return cls(doc.get("name", "species"), exact(doc["e"]), exact(doc["m"]),
                   doc.get("profile", {"kind": "maxwellian"}))

    def to_dict(self) -> dict:
        return {"name": self.name, "e": str(self.charge), "m": str(self.mass), "profile": self.profile}


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Periodic x on [0, L); cell-centred v on [-V, V] (treated as periodic in v)."""

    L: float
    V: float
    nx: int
    nv: int

    def __post_init__(self):
        if self.L <= 0 or self.V <= 0 or self.nx < 4 or self.nv < 4:
            raise ValueError("grid needs L, V > 0 and at least 4 points per axis")

    @property
    def dx(self) -> float:
        return self.L / self.nx

    @property
    def dv(self) -> float:
        return 2 * self.V / self.nv

    @property
    def x(self) -> np.ndarray:
        return self.dx * np.arange(self.nx)

    @property
    def v(self) -> np.ndarray:
        return -self.V + self.dv * (np.arange(self.nv) + 0.5)

    @property
    def kx(self) -> np.ndarray:
        return 2 * np.pi * np.fft.rfftfreq(self.nx, self.dx)

    def scaled(self, lam: float) -> PhaseSpaceGrid:
        return PhaseSpaceGrid(self.L * lam, self.V * lam, self.nx, self.nv)


def profile_values(grid: PhaseSpaceGrid, profile: dict) -> np.ndarray:
    """Evaluate a profile descriptor on the (x, v) grid.

    Kinds: ``maxwellian`` (density, vth, drift, amplitude, mode) and ``zero``.
    The density perturbation is ``1 + amplitude cos(2 pi mode x / L)``.
    """
    kind = profile.get("kind", "maxwellian")
    if kind == "zero":
        return np.zeros((grid.nx, grid.nv))
    if kind != "maxwellian":
        raise ValueError(f"unknown profile kind {kind!r}")
    n0 = float(profile.get("density", 1.0))
    vth = float(profile.get("vth", 1.0))
    u = float(profile.get("drift", 0.0))
    amp = float(profile.get("amplitude", 0.0))
    mode = int(profile.get("mode", 1))
    x, v = grid.x[:, None], grid.v[None, :]
    dens = n0 * (1 + amp * np.cos(2 * np.pi * mode * x / grid.L))
    return dens * np.exp(-0.5 * ((v - u) / vth) ** 2) / (math.sqrt(2 * math.pi) * vth)


@dataclass(frozen=True)
class PhaseSpaceState:
    grid: PhaseSpaceGrid
    species: tuple[SpeciesSpec, ...]
    f: tuple[np.ndarray, ...]
    E: np.ndarray
    background: float
    time: float = 0.0

    def density(self, i: int) -> np.ndarray:
        return self.f[i].sum(axis=1) * self.grid.dv

    def current(self, i: int) -> np.ndarray:
        return self.f[i] @ self.grid.v * self.grid.dv

    def charge_density(self) -> np.ndarray:
        rho = np.full(self.grid.nx, self.background)
        for i, s in enumerate(self.species):
            rho = rho + float(s.charge) * self.density(i)
        return rho

    def current_density(self) -> np.ndarray:
        j = np.zeros(self.grid.nx)
        for i, s in enumerate(self.species):
            j = j + float(s.charge) * self.current(i)
        return j

    def mass(self, i: int) -> float:
        return float(self.f[i].sum()) * self.grid.dx * self.grid.dv

    def kinetic_energy(self) -> float:
        v2 = self.grid.v ** 2
        return sum(0.5 * float(s.mass) * float((self.f[i] @ v2).sum()) * self.grid.dx * self.grid.dv
                   for i, s in enumerate(self.species))

    def field_energy(self) -> float:
        return 0.5 * float(np.sum(self.E ** 2)) * self.grid.dx

    def total_energy(self) -> float:
        return self.kinetic_energy() + self.field_energy()


def poisson_field(grid: PhaseSpaceGrid, rho: np.ndarray) -> np.ndarray:
    """Zero-mean E with dE/dx = rho (the mean of rho is discarded)."""
    k = grid.kx
    rh = np.fft.rfft(rho)
    eh = np.zeros_like(rh)
    eh[1:] = rh[1:] / (1j * k[1:])
    if grid.nx % 2 == 0:
        eh[-1] = 0.0
    return np.fft.irfft(eh, grid.nx)


def check_neutrality(state: PhaseSpaceState, tol: float = 1e-10) -> float:
    total = float(np.mean(state.charge_density()))
    scale = abs(state.background) + sum(abs(float(s.charge)) * float(np.mean(state.density(i)))
                                        for i, s in enumerate(state.species))
    scale = max(scale, 1e-300)
    if abs(total) > tol * scale:
        raise NeutralityError(f"net charge density {total:.3e} violates neutrality")
    return total


def initial_state(grid: PhaseSpaceGrid, species, mean_field: float = 0.0) -> PhaseSpaceState:
    """State from profile descriptors with a neutralising uniform background.

    E is the Poisson field plus the uniform component ``mean_field``.
    """
    species = tuple(species)
    if not species:
        raise ValueError("at least one species is required")
    f = tuple(profile_values(grid, s.profile) for s in species)
    tmp = PhaseSpaceState(grid, species, f, np.zeros(grid.nx), 0.0)
    bg = -float(np.mean(tmp.charge_density()))
    tmp = replace(tmp, background=bg)
    E = poisson_field(grid, tmp.charge_density()) + mean_field
    return replace(tmp, E=E)
