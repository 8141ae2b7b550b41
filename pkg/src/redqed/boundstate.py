"""Variational single-electron trial state dressed by one transverse photon.

The trial field at node pair (k_ph, k) is

    sqrt(rho_vac)|0,0,{}> + a00|0,0,{1}> + a10|1,0,{1}> + a01|0,1,{1}>

and at the variational optimum a10 = -U^H a00(k_ph, k + k_ph),
a01 = -U^V a00(k_ph, k + k_ph).  Amplitude profiles are analytic callables so
the shifted argument k + k_ph needs no grid matching.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .boson import normalization_factor
from .constants import NATURAL, PhysicalConstants
from .errors import ConfigurationError, DivergenceError, DomainError, FeasibilityError
from .fermion import GAMMA, dispersion, solve_spinors
from .kspace import QuadratureGrid, pairwise_sum
from .photon import rotation_to_z

COUPLING_METHODS = ("closed-form", "spinor")
PARALLEL_TOL = 8 * np.finfo(float).eps


def _pairs(k_ph, k):
    k_ph = np.asarray(k_ph, dtype=float)
    k = np.asarray(k, dtype=float)
    k_ph, k = np.broadcast_arrays(k_ph, k)
    if k_ph.shape[-1] != 3:
        raise DomainError("wave vectors must have 3 components")
    kn = np.linalg.norm(k_ph, axis=-1)
    if np.any(kn == 0):
        raise DomainError("photon wave vector must be non-zero")
    if not (np.all(np.isfinite(k_ph)) and np.all(np.isfinite(k))):
        raise DomainError("wave vectors must be finite")
    return k_ph, k, kn


def coupling_prefactor(kn, consts: PhysicalConstants = NATURAL):
    """lambda q c / (4 N0(k_ph) hbar |k_ph|)."""
    return consts.lam * consts.q_el * consts.c / (4 * normalization_factor(kn, consts.ell) * consts.hbar * kn)


def _energy_factor(k, kp, consts):
    w = dispersion(k.reshape(-1, 3), consts.kappa, consts.c).reshape(k.shape[:-1])
    wp = dispersion(kp.reshape(-1, 3), consts.kappa, consts.c).reshape(k.shape[:-1])
    ck = consts.c * consts.kappa
    return w, wp, (w + wp + 2 * ck) / np.sqrt(wp * (wp + ck) * w * (w + ck))


def transverse_square(k_ph, k):
    """|k|^2 - (k . k_ph)^2/|k_ph|^2 from the cross product; exactly 0 for rounding-level parallel pairs."""
    k_ph, k, kn = _pairs(k_ph, k)
    cross = np.linalg.norm(np.cross(k, k_ph), axis=-1) / kn
    kk = np.linalg.norm(k, axis=-1)
    cross = np.where(cross <= PARALLEL_TOL * kk, 0.0, cross)
    return cross**2


@dataclass(frozen=True)
class CouplingFunctions:
    """U^H, U^V at a set of (k_ph, k) pairs."""

    u_h: np.ndarray
    u_v: np.ndarray

    @property
    def u_perp_sq(self) -> np.ndarray:
        return np.abs(self.u_h) ** 2 + np.abs(self.u_v) ** 2


def coupling(k_ph, k, consts: PhysicalConstants = NATURAL, method: str = "closed-form") -> CouplingFunctions:
    """Photon-electron coupling U^(H/V)(k_ph, k).

    ``closed-form``: -P sum_alpha eps_alpha k_alpha (w + w' + 2 c kappa)/sqrt(w'(w'+c kappa) w(w+c kappa))
    with P = lambda q c/(4 N0 hbar |k_ph|) and w' = omega(k + k_ph).
    ``spinor``: (P/c) sum_alpha eps_alpha <u1(k)|gamma^0 gamma^alpha u1(k + k_ph)> from the Dirac spinors.
    """
    k_ph, k, kn = _pairs(k_ph, k)
    shape = kn.shape
    xi = rotation_to_z(k_ph.reshape(-1, 3)).reshape(shape + (3, 3))
    eps = xi[..., :2, :]
    pref = coupling_prefactor(kn, consts)
    kp = k + k_ph
    if method == "closed-form":
        _, _, ratio = _energy_factor(k, kp, consts)
        proj = np.einsum("...pa,...a->...p", eps, k)
        proj = np.where((transverse_square(k_ph, k) == 0)[..., None], 0.0, proj)
        u = -(pref * ratio)[..., None] * proj
    elif method == "spinor":
        u1 = solve_spinors(k.reshape(-1, 3), consts).u1.reshape(shape + (4,))
        u1p = solve_spinors(kp.reshape(-1, 3), consts).u1.reshape(shape + (4,))
        g0g = np.einsum("ij,ajk->ajk", GAMMA[0], GAMMA[1:])
        elem = np.einsum("...i,aij,...j->...a", u1.conj(), g0g, u1p)
        u = (pref / consts.c)[..., None] * np.einsum("...pa,...a->...p", eps, elem)
    else:
        raise ConfigurationError(f"unknown coupling method {method!r}; choose from {COUPLING_METHODS}")
    return CouplingFunctions(u[..., 0], u[..., 1])


def u_perp_sq_closed_form(k_ph, k, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """U_perp^2 from the transverse-projection form."""
    k_ph, k, kn = _pairs(k_ph, k)
    _, _, ratio = _energy_factor(k, k + k_ph, consts)
    return (coupling_prefactor(kn, consts) * ratio) ** 2 * transverse_square(k_ph, k)


def u_perp_sq_lower_bound(k_ph, k, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """P^2 k_perp^2 4/(omega(k) omega(k + k_ph)), a lower bound of U_perp^2."""
    k_ph, k, kn = _pairs(k_ph, k)
    w, wp, _ = _energy_factor(k, k + k_ph, consts)
    return coupling_prefactor(kn, consts) ** 2 * transverse_square(k_ph, k) * 4 / (w * wp)


def u_perp_sq_long_wavelength(k_ph, k, consts: PhysicalConstants = NATURAL, first_order: bool = True):
    """Small-|k_ph| expansion P^2 k_perp^2 (4/omega^2)[1 - k.k_ph/(kappa^2 + |k|^2)]."""
    k_ph, k, kn = _pairs(k_ph, k)
    w = dispersion(k.reshape(-1, 3), consts.kappa, consts.c).reshape(kn.shape)
    lead = coupling_prefactor(kn, consts) ** 2 * transverse_square(k_ph, k) * 4 / w**2
    if not first_order:
        return lead
    corr = np.einsum("...a,...a->...", k, k_ph) / (consts.kappa**2 + np.sum(k**2, axis=-1))
    return lead * (1 - corr)


# ---------------------------------------------------------------- trial profiles

AmplitudeProfile = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GaussianAmplitude:
    """a00(k_ph, k) = A exp(-|k - k_c|^2/(2 s^2)) |k_ph|^3/(|k_ph|^3 + k0^3) g(|k_ph|).

    g is exp(-|k_ph|^2/(2 s_ph^2)) when ``photon_width`` is given, else 1.
    """

    amplitude: float = 0.1
    center: tuple = (0.0, 0.0, 0.0)
    width: float = 1.0
    k0: float = 0.5
    photon_width: float | None = None

    def __post_init__(self):
        if not (self.width > 0 and self.k0 > 0):
            raise ConfigurationError("width and k0 must be positive")
        if self.photon_width is not None and not self.photon_width > 0:
            raise ConfigurationError("photon_width must be positive")

    def __call__(self, k_ph, k):
        k_ph = np.asarray(k_ph, dtype=float)
        k = np.asarray(k, dtype=float)
        kn = np.linalg.norm(k_ph, axis=-1)
        d2 = np.sum((k - np.asarray(self.center, dtype=float)) ** 2, axis=-1)
        reg = kn**3 / (kn**3 + self.k0**3)
        if self.photon_width is not None:
            reg = reg * np.exp(-kn**2 / (2 * self.photon_width**2))
        return self.amplitude * np.exp(-d2 / (2 * self.width**2)) * reg

    def scaled(self, alpha: float) -> "GaussianAmplitude":
        return GaussianAmplitude(self.amplitude * alpha, self.center, self.width, self.k0, self.photon_width)


@dataclass(frozen=True)
class TrialState:
    """Amplitudes at node pairs, arrays of shape (N_ph, N_k).

    ``a00_shift`` holds a00(k_ph, k + k_ph), which the optimal photon
    amplitudes and the interaction energy refer to.
    """

    kph_grid: QuadratureGrid
    k_grid: QuadratureGrid
    a00: np.ndarray
    a00_shift: np.ndarray
    a10: np.ndarray
    a01: np.ndarray
    rho_vac: np.ndarray
    coupling: CouplingFunctions
    method: str = "closed-form"

    def normalization_residual(self) -> float:
        total = self.rho_vac + np.abs(self.a00) ** 2 + np.abs(self.a10) ** 2 + np.abs(self.a01) ** 2
        return float(np.max(np.abs(total - 1.0), initial=0.0))

    def node_vectors(self):
        """Coefficients of |0,0,{}>, |0,0,{1}>, |1,0,{1}>, |0,1,{1}> at every node pair."""
        return np.stack([np.sqrt(self.rho_vac), self.a00, self.a10, self.a01], axis=-1)


def _pair_nodes(kph_grid, k_grid):
    kph = np.broadcast_to(kph_grid.nodes[:, None, :], (len(kph_grid), len(k_grid), 3))
    k = np.broadcast_to(k_grid.nodes[None, :, :], (len(kph_grid), len(k_grid), 3))
    return kph, k


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    min_rho_vac: float
    worst_kph: np.ndarray
    worst_k: np.ndarray


def feasibility(profile: AmplitudeProfile, kph_grid: QuadratureGrid, k_grid: QuadratureGrid,
                consts: PhysicalConstants = NATURAL, method: str = "closed-form") -> FeasibilityReport:
    """Smallest rho_vac = 1 - |a00|^2 - U_perp^2 |a00(k + k_ph)|^2 over the node pairs."""
    kph, k = _pair_nodes(kph_grid, k_grid)
    u2 = coupling(kph, k, consts, method).u_perp_sq
    rho = 1 - np.abs(profile(kph, k)) ** 2 - u2 * np.abs(profile(kph, k + kph)) ** 2
    i, j = np.unravel_index(int(np.argmin(rho)), rho.shape)
    return FeasibilityReport(bool(rho[i, j] >= 0), float(rho[i, j]), kph_grid.nodes[i].copy(), k_grid.nodes[j].copy())


def variational_optimum(profile: AmplitudeProfile, kph_grid: QuadratureGrid, k_grid: QuadratureGrid,
                        consts: PhysicalConstants = NATURAL, method: str = "closed-form") -> TrialState:
    """Optimal photon amplitudes for fixed a00; raises FeasibilityError if rho_vac < 0 anywhere."""
    kph, k = _pair_nodes(kph_grid, k_grid)
    cf = coupling(kph, k, consts, method)
    a00 = np.asarray(profile(kph, k), dtype=complex)
    shift = np.asarray(profile(kph, k + kph), dtype=complex)
    a10 = -cf.u_h * shift
    a01 = -cf.u_v * shift
    rho = 1 - np.abs(a00) ** 2 - np.abs(a10) ** 2 - np.abs(a01) ** 2
    if not np.all(np.isfinite(rho)):
        raise DivergenceError("non-finite amplitudes in trial state")
    if np.any(rho < 0):
        i, j = np.unravel_index(int(np.argmin(rho)), rho.shape)
        worst = {"k_ph": kph_grid.nodes[i].tolist(), "k": k_grid.nodes[j].tolist(), "rho_vac": float(rho[i, j])}
        raise FeasibilityError(f"trial state infeasible: rho_vac = {rho[i, j]:.3e} at node pair {worst}", worst)
    return TrialState(kph_grid, k_grid, a00, shift, a10, a01, rho, cf, method)


# ---------------------------------------------------------------- energies

@dataclass(frozen=True)
class Energies:
    photon: float
    electron: float
    interaction: float

    @property
    def total(self) -> float:
        return self.electron + self.photon + self.interaction

    @property
    def identity_defect(self) -> float:
        """|E_int + 2 E_ph| / E_ph (0 when no photons are present)."""
        if self.photon == 0:
            return abs(self.interaction)
        return abs(self.interaction + 2 * self.photon) / abs(self.photon)


def _integrate2(kph_grid, k_grid, values):
    w = kph_grid.weights[:, None] * k_grid.weights[None, :]
    out = pairwise_sum((w * values).ravel())
    if not np.isfinite(out):
        raise DivergenceError("energy quadrature produced a non-finite value")
    return float(out)


def matrix_elements(state: TrialState, consts: PhysicalConstants = NATURAL) -> tuple[np.ndarray, np.ndarray]:
    """sum_alpha eps^(H/V)_alpha <u1(k)|gamma^0 gamma^alpha u1(k + k_ph)> consistent with ``state.method``.

    For the closed form this is U / (lambda q / (4 N0 hbar |k_ph|)), the element that generates it.
    """
    kn = state.kph_grid.radii[:, None]
    inv = 1.0 / (coupling_prefactor(kn, consts) / consts.c)
    return state.coupling.u_h * inv, state.coupling.u_v * inv


def energies(state: TrialState, consts: PhysicalConstants = NATURAL) -> Energies:
    """Photon, electron and interaction energies of a trial state.

    E_ph  = ell^6 int int hbar c |k_ph| (|a10|^2 + |a01|^2)
    E_el  = ell^6 int int hbar omega(k) (|a00|^2 + |a10|^2 + |a01|^2)
    E_int = 2 ell^6 int int (lambda q c/(4 N0)) Re[conj(a10) a00(k+k_ph) M^H + conj(a01) a00(k+k_ph) M^V]
    """
    ell6 = consts.ell**6
    kn = state.kph_grid.radii[:, None]
    omega = dispersion(state.k_grid.nodes, consts.kappa, consts.c)[None, :]
    ph_dens = np.abs(state.a10) ** 2 + np.abs(state.a01) ** 2
    e_ph = ell6 * _integrate2(state.kph_grid, state.k_grid, consts.hbar * consts.c * kn * ph_dens)
    el_dens = np.abs(state.a00) ** 2 + ph_dens
    e_el = ell6 * _integrate2(state.kph_grid, state.k_grid, consts.hbar * omega * el_dens)
    mh, mv = matrix_elements(state, consts)
    g = consts.lam * consts.q_el * consts.c / (4 * normalization_factor(kn, consts.ell))
    cross = np.conj(state.a10) * state.a00_shift * mh + np.conj(state.a01) * state.a00_shift * mv
    e_int = 2 * ell6 * _integrate2(state.kph_grid, state.k_grid, g * cross.real)
    return Energies(e_ph, e_el, e_int)


def photon_energy_shifted(profile: AmplitudeProfile, kph_grid: QuadratureGrid, k_grid: QuadratureGrid,
                          consts: PhysicalConstants = NATURAL) -> float:
    """E_ph = ell^6 int int hbar c |k_ph| |a00(k_ph, k)|^2 U_perp^2(k_ph, k - k_ph)."""
    kph, k = _pair_nodes(kph_grid, k_grid)
    u2 = u_perp_sq_closed_form(kph, k - kph, consts)
    kn = kph_grid.radii[:, None]
    vals = consts.hbar * consts.c * kn * np.abs(profile(kph, k)) ** 2 * u2
    return consts.ell**6 * _integrate2(kph_grid, k_grid, vals)


# ---------------------------------------------------------------- long-wavelength scan

@dataclass(frozen=True)
class LongWavelengthScan:
    magnitudes: np.ndarray
    directions: np.ndarray
    u_perp_sq: np.ndarray
    slopes: np.ndarray
    parallel: np.ndarray


def fit_loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def long_wavelength_scan(k, directions, magnitudes, consts: PhysicalConstants = NATURAL) -> LongWavelengthScan:
    """U_perp^2(|k_ph| d, k) on a sweep of magnitudes for each unit direction d.

    Slopes are fitted only for directions not parallel to k; ``parallel`` flags the rest.
    """
    k = np.asarray(k, dtype=float).reshape(3)
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    d = d / np.linalg.norm(d, axis=1)[:, None]
    mags = np.asarray(magnitudes, dtype=float)
    kph = d[:, None, :] * mags[None, :, None]
    u2 = u_perp_sq_closed_form(kph, np.broadcast_to(k, kph.shape), consts)
    parallel = np.all(u2 == 0, axis=1)
    slopes = np.array([np.nan if par else fit_loglog_slope(mags, row) for row, par in zip(u2, parallel)])
    return LongWavelengthScan(mags, d, u2, slopes, parallel)


def decay_exponent(profile: AmplitudeProfile, k, direction, magnitudes) -> float:
    """Fitted exponent p of |a00(|k_ph| d, k)| ~ |k_ph|^p toward k_ph -> 0."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    mags = np.asarray(magnitudes, dtype=float)
    vals = np.abs(profile(mags[:, None] * d, np.broadcast_to(np.asarray(k, float), (len(mags), 3))))
    return fit_loglog_slope(mags, vals)


def long_wavelength_admissible(profile: AmplitudeProfile, k, direction, magnitudes,
                               consts: PhysicalConstants = NATURAL) -> bool:
    """True when U_perp^2 |a00(k + k_ph)|^2 stays bounded by 1 and does not grow as k_ph -> 0."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    mags = np.sort(np.asarray(magnitudes, dtype=float))
    k = np.broadcast_to(np.asarray(k, float), (len(mags), 3))
    kph = mags[:, None] * d
    load = u_perp_sq_closed_form(kph, k, consts) * np.abs(profile(kph, k + kph)) ** 2
    if np.all(load == 0):
        return True
    return bool(np.all(load <= 1) and load[0] <= load[-1] * (1 + 1e-9))
