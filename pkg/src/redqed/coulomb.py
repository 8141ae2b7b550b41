"""Coulomb term added to transverse expectation fields on a cubic lattice.

E'' = E' + (mu0 c / 4 pi) grad phi with phi(x) = int dy j0(y)/|x - y|, so that
div E'' = -mu0 c j0 whenever div E' = 0.  The open-boundary potential is the
exact lattice sum sum_y G(x - y) j0(y) h^3 evaluated by zero-padded FFT
convolution; the periodic variant inverts the Laplacian spectrally.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft
from scipy.special import erf

from .constants import NATURAL, PhysicalConstants
from .errors import ConfigurationError, DomainError
from .kspace import get_default_threads

SELF_CELL = 2.380077363979557
"""Mean of 1/|x| over the unit cube centred at the origin (in units of 1/h)."""

MIN_POINTS = 16


@dataclass(frozen=True)
class SpatialGrid:
    """Cubic lattice of n^3 cell centres with spacing h, centred at ``center``."""

    n: int
    h: float
    periodic: bool = False
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise ConfigurationError(f"grid needs at least {MIN_POINTS} points per axis")
        if not self.h > 0:
            raise ConfigurationError("grid spacing must be positive")

    @classmethod
    def from_extent(cls, n: int, length: float, periodic: bool = False) -> "SpatialGrid":
        return cls(n, length / n, periodic)

    @property
    def length(self) -> float:
        return self.n * self.h

    @property
    def axis(self) -> np.ndarray:
        return (np.arange(self.n) - (self.n - 1) / 2) * self.h

    def coordinates(self) -> np.ndarray:
        """Cell centres, shape (n, n, n, 3)."""
        ax = self.axis
        X = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1)
        return X + np.asarray(self.center, dtype=float)


@dataclass(frozen=True)
class ClassicalFieldSet:
    """Expectation-level fields on a SpatialGrid; vectors have shape (n, n, n, 3)."""

    grid: SpatialGrid
    E: np.ndarray
    B: np.ndarray
    j0: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        n = self.grid.n
        for name, shape in (("E", (n, n, n, 3)), ("B", (n, n, n, 3)), ("j0", (n, n, n)), ("j", (n, n, n, 3))):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ConfigurationError(f"field {name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"field {name} has non-finite values")
            object.__setattr__(self, name, arr)

    @classmethod
    def sourceless(cls, grid: SpatialGrid, E=None, B=None) -> "ClassicalFieldSet":
        z3 = np.zeros((grid.n,) * 3 + (3,))
        return cls(grid, z3 if E is None else E, z3 if B is None else B, np.zeros((grid.n,) * 3), z3)

    def total_charge(self) -> float:
        return float(np.sum(self.j0) * self.grid.h**3)


# ---------------------------------------------------------------- potentials

def _check_density(j0, grid):
    j0 = np.asarray(j0, dtype=float)
    if j0.shape != (grid.n,) * 3:
        raise ConfigurationError(f"density has shape {j0.shape}, expected {(grid.n,) * 3}")
    if not np.all(np.isfinite(j0)):
        raise DomainError("density has non-finite values")
    return j0


def _open_kernel(grid: SpatialGrid) -> np.ndarray:
    n, h = grid.n, grid.h
    idx = np.arange(2 * n)
    idx = np.where(idx <= n, idx, idx - 2 * n) * h
    X, Y, Z = np.meshgrid(idx, idx, idx, indexing="ij", sparse=True)
    r = np.sqrt(X**2 + Y**2 + Z**2)
    G = np.divide(1.0, r, out=np.zeros_like(r), where=r > 0)
    G[0, 0, 0] = SELF_CELL / h
    return G


def newtonian_potential(j0, grid: SpatialGrid, workers: int | None = None) -> np.ndarray:
    """phi(x) = int dy j0(y)/|x - y| on the lattice.

    Open grids: sum_y G(x - y) j0(y) h^3 with G = 1/r and the cell-averaged
    self term, via zero-padded FFT.  Periodic grids: phi_hat = 4 pi j0_hat/|k|^2
    with the mean charge removed.
    """
    j0 = _check_density(j0, grid)
    n, h = grid.n, grid.h
    workers = get_default_threads() if workers is None else workers
    if grid.periodic:
        k = 2 * np.pi * fft.fftfreq(n, d=h)
        KX, KY, KZ = np.meshgrid(k, k, k, indexing="ij", sparse=True)
        k2 = KX**2 + KY**2 + KZ**2
        rho = fft.fftn(j0, workers=workers)
        phi = np.divide(4 * np.pi * rho, k2, out=np.zeros_like(rho), where=k2 > 0)
        return fft.ifftn(phi, workers=workers).real
    G = fft.rfftn(_open_kernel(grid), workers=workers)
    rho = fft.rfftn(j0, s=(2 * n,) * 3, workers=workers)
    out = fft.irfftn(G * rho, s=(2 * n,) * 3, workers=workers)
    return out[:n, :n, :n] * h**3


def gradient(f, grid: SpatialGrid) -> np.ndarray:
    """Second-order central differences (one-sided second order at open edges), shape (..., 3)."""
    if grid.periodic:
        return np.stack([(np.roll(f, -1, axis=a) - np.roll(f, 1, axis=a)) / (2 * grid.h) for a in range(3)], axis=-1)
    return np.stack(np.gradient(f, grid.h, edge_order=2), axis=-1)


def divergence(V, grid: SpatialGrid) -> np.ndarray:
    if grid.periodic:
        return sum((np.roll(V[..., a], -1, axis=a) - np.roll(V[..., a], 1, axis=a)) / (2 * grid.h) for a in range(3))
    return sum(np.gradient(V[..., a], grid.h, axis=a, edge_order=2) for a in range(3))


def curl(V, grid: SpatialGrid) -> np.ndarray:
    def d(f, a):
        if grid.periodic:
            return (np.roll(f, -1, axis=a) - np.roll(f, 1, axis=a)) / (2 * grid.h)
        return np.gradient(f, grid.h, axis=a, edge_order=2)

    return np.stack([
        d(V[..., 2], 1) - d(V[..., 1], 2),
        d(V[..., 0], 2) - d(V[..., 2], 0),
        d(V[..., 1], 0) - d(V[..., 0], 1),
    ], axis=-1)


def coulomb_correction(j0, grid: SpatialGrid, consts: PhysicalConstants = NATURAL,
                       workers: int | None = None) -> np.ndarray:
    """(mu0 c / 4 pi) grad phi[j0], shape (n, n, n, 3)."""
    phi = newtonian_potential(j0, grid, workers)
    return consts.mu0 * consts.c / (4 * np.pi) * gradient(phi, grid)


def add_coulomb(fields: ClassicalFieldSet, consts: PhysicalConstants = NATURAL) -> ClassicalFieldSet:
    """E'' = E' + Coulomb term of j0; B'' = B'."""
    Ec = coulomb_correction(fields.j0, fields.grid, consts)
    return ClassicalFieldSet(fields.grid, fields.E + Ec, fields.B, fields.j0, fields.j)


def remove_coulomb(fields: ClassicalFieldSet, consts: PhysicalConstants = NATURAL) -> ClassicalFieldSet:
    """Inverse of ``add_coulomb``: subtracts the Coulomb term of j0 from E."""
    Ec = coulomb_correction(fields.j0, fields.grid, consts)
    return ClassicalFieldSet(fields.grid, fields.E - Ec, fields.B, fields.j0, fields.j)


def emergent_current(j0_before, j0_after, dt: float, grid: SpatialGrid,
                     consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """j''_alpha = -(1/(mu0 c)) d/dx^0 (E'' - E') by a central difference over x^0 in [t - dt, t + dt].

    ``dt`` is the x^0 step (c times the time step).
    """
    diff = coulomb_correction(np.asarray(j0_after) - np.asarray(j0_before), grid, consts)
    return -diff / (2 * dt * consts.mu0 * consts.c)


# ---------------------------------------------------------------- residuals

def _interior(grid: SpatialGrid, margin: int):
    if grid.periodic or margin == 0:
        return (slice(None),) * 3
    return (slice(margin, grid.n - margin),) * 3


def relative_l2(residual, reference) -> float:
    den = np.sqrt(np.sum(np.asarray(reference) ** 2))
    num = np.sqrt(np.sum(np.asarray(residual) ** 2))
    return float(num / den) if den > 0 else float(num)


@dataclass(frozen=True)
class MaxwellReport:
    gauss: float
    div_b: float
    curl_correction: float
    faraday_change: float


def verify_maxwell(fields: ClassicalFieldSet, corrected: ClassicalFieldSet,
                   consts: PhysicalConstants = NATURAL, margin: int = 2) -> MaxwellReport:
    """Finite-difference residuals of the corrected system.

    gauss: relative L2 of div E'' + mu0 c j0 (absolute when j0 = 0),
    div_b: max |div B''|, curl_correction: max |curl(E'' - E')| in the interior,
    faraday_change: max |curl E'' - curl E'| (the correction leaves the curl unchanged).
    """
    g = corrected.grid
    sl = _interior(g, margin)
    src = consts.mu0 * consts.c * corrected.j0
    res = divergence(corrected.E, g) + src
    gauss = relative_l2(res[sl], src[sl])
    div_b = float(np.max(np.abs(divergence(corrected.B, g)[sl]), initial=0.0))
    dE = corrected.E - fields.E
    curl_corr = float(np.max(np.abs(curl(dE, g)[sl]), initial=0.0))
    faraday = float(np.max(np.abs((curl(corrected.E, g) - curl(fields.E, g))[sl]), initial=0.0))
    return MaxwellReport(gauss, div_b, curl_corr, faraday)


def convergence_order(hs, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


def box_flux(V, grid: SpatialGrid, margin: int = 2) -> float:
    """Outward flux of V through the faces of the box shrunk by ``margin`` cells (midpoint rule)."""
    lo, hi = margin, grid.n - 1 - margin
    s = slice(lo, hi + 1)
    h2 = grid.h**2
    flux = 0.0
    flux += np.sum(V[hi, s, s, 0]) - np.sum(V[lo, s, s, 0])
    flux += np.sum(V[s, hi, s, 1]) - np.sum(V[s, lo, s, 1])
    flux += np.sum(V[s, s, hi, 2]) - np.sum(V[s, s, lo, 2])
    return float(flux * h2)


# ---------------------------------------------------------------- density presets

def gaussian_density(grid: SpatialGrid, charge: float = 1.0, sigma: float = 1.0, center=(0.0, 0.0, 0.0)):
    X = grid.coordinates() - np.asarray(center, dtype=float)
    r2 = np.sum(X**2, axis=-1)
    return charge * np.exp(-r2 / (2 * sigma**2)) / (2 * np.pi * sigma**2) ** 1.5


def dipole_density(grid: SpatialGrid, charge: float = 1.0, sigma: float = 0.6, separation: float = 2.0):
    off = np.array([separation / 2, 0.0, 0.0])
    return gaussian_density(grid, charge, sigma, off) - gaussian_density(grid, charge, sigma, -off)


def translating_gaussian(grid: SpatialGrid, x0: float, velocity=(0.3, 0.0, 0.0), charge: float = 1.0,
                         sigma: float = 1.0):
    """Gaussian charge whose centre moves as velocity * x0 (x0 = c t)."""
    return gaussian_density(grid, charge, sigma, np.asarray(velocity, dtype=float) * x0)


def gaussian_coulomb_field(x, charge: float = 1.0, sigma: float = 1.0, center=(0.0, 0.0, 0.0),
                           consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """Analytic (mu0 c/4 pi) grad[Q erf(r/(sqrt 2 sigma))/r] for a Gaussian charge."""
    X = np.asarray(x, dtype=float) - np.asarray(center, dtype=float)
    r = np.linalg.norm(X, axis=-1)
    s = np.sqrt(2) * sigma
    with np.errstate(invalid="ignore", divide="ignore"):
        dphi = charge * (2 / np.sqrt(np.pi) * np.exp(-(r / s) ** 2) / (s * r) - erf(r / s) / r**2)
        radial = np.where(r > 0, dphi / r, 0.0)
    return consts.mu0 * consts.c / (4 * np.pi) * radial[..., None] * X


DENSITY_PRESETS = ("gaussian", "dipole", "translating-gaussian")
