"""Truncated harmonic-oscillator modes and the free scalar field.

Each wave vector carries its own oscillator, truncated to Fock levels
0..N_max. Field operators are node-wise matrices; expectations over a
k-field reproduce classical solutions of the free wave equation.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma
from typing import Callable

import numpy as np
from scipy.special import erf

from .constants import NATURAL, PhysicalConstants
from .errors import ConfigurationError, DomainError, TruncationError
from .kspace import DiagonalOperator, KField, QuadratureGrid

DEFAULT_CUTOFF = 32


def ladder(cutoff: int) -> np.ndarray:
    """Annihilation matrix on levels 0..cutoff."""
    if int(cutoff) != cutoff or cutoff < 1:
        raise ConfigurationError(f"Fock cutoff must be a positive integer, got {cutoff!r}")
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1).astype(complex)


@dataclass(frozen=True)
class OscillatorSpace:
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        ladder(self.cutoff)

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def a(self) -> np.ndarray:
        return ladder(self.cutoff)

    @property
    def adag(self) -> np.ndarray:
        return self.a.conj().T

    @property
    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.dim, dtype=float)).astype(complex)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def fock(self, n: int) -> np.ndarray:
        if not 0 <= n <= self.cutoff:
            raise TruncationError(f"level {n} outside 0..{self.cutoff}")
        v = np.zeros(self.dim, dtype=complex)
        v[n] = 1.0
        return v

    def safe_projector(self, levels: int | None = None) -> np.ndarray:
        """Projector onto levels 0..levels (default: all but the top one)."""
        levels = self.cutoff - 1 if levels is None else levels
        p = np.zeros((self.dim, self.dim))
        p[: levels + 1, : levels + 1] = np.eye(levels + 1)
        return p


def coherent_amplitudes(z, cutoff: int) -> np.ndarray:
    """Unnormalized Poisson amplitudes z^n / sqrt(n!), vectorized over z."""
    z = np.asarray(z, dtype=complex)
    n = np.arange(cutoff + 1)
    logfact = np.array([0.5 * lgamma(m + 1) for m in n])
    absz = np.abs(z)[..., None]
    logabs = n * np.log(np.where(absz > 0, absz, 1.0))
    logabs = np.where((absz == 0) & (n > 0), -np.inf, logabs)
    return np.exp(logabs - logfact) * np.exp(1j * n * np.angle(z)[..., None])


def truncation_guard(z, cutoff):
    absz2 = np.abs(np.asarray(z)) ** 2
    if not np.all(np.isfinite(absz2)):
        raise DomainError("coherent amplitude is not finite")
    if np.any(absz2 > cutoff / 4):
        raise TruncationError(
            f"|z|^2 = {float(np.max(absz2)):.4g} exceeds the guard cutoff/4 = {cutoff / 4:.4g}")


def coherent_state(z: complex, space: OscillatorSpace) -> np.ndarray:
    """Truncated, renormalized coherent state |z>."""
    truncation_guard(z, space.cutoff)
    v = coherent_amplitudes(z, space.cutoff)
    return v / np.linalg.norm(v)


def coherent_residual_bound(z: complex, space: OscillatorSpace) -> float:
    """Exact value of ||a|z> - z|z>|| for the truncated state.

    Truncation only breaks the eigenrelation at the top level, where the
    missing term is z times the top amplitude.
    """
    return float(abs(z) * abs(coherent_state(z, space)[-1]))


@dataclass(frozen=True)
class CoherentProfile:
    """Wave-vector profile F(k) of a coherent field.

    ``rule`` maps an (N, 3) node array to complex F values. The physical
    profile is f = ell^(3/2) F.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    ell: float = 1.0

    @classmethod
    def from_physical(cls, f: Callable[[np.ndarray], np.ndarray], ell: float = 1.0) -> "CoherentProfile":
        return cls(lambda k: np.asarray(f(k), dtype=complex) * ell ** -1.5, ell)

    def values(self, nodes) -> np.ndarray:
        vals = np.asarray(self.rule(np.atleast_2d(np.asarray(nodes, dtype=float))), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise DomainError("profile is not finite on the grid")
        return vals

    def physical(self, nodes) -> np.ndarray:
        return self.ell ** 1.5 * self.values(nodes)


def gaussian_profile(amplitude: complex = 1.0, center=(0.0, 0.0, 0.0), width: float = 0.5,
                     ell: float = 1.0) -> CoherentProfile:
    center = np.asarray(center, dtype=float)

    def f(k):
        return amplitude * np.exp(-np.sum((k - center) ** 2, axis=-1) / (2 * width**2))

    return CoherentProfile.from_physical(f, ell)


def shell_profile(k0: float, amplitude: complex = 1.0, width: float = 0.1, direction=None,
                  ell: float = 1.0) -> CoherentProfile:
    """Profile concentrated near |k| = k0, optionally also along ``direction``."""
    if direction is not None:
        d = np.asarray(direction, dtype=float)
        target = k0 * d / np.linalg.norm(d)

        def f(k):
            return amplitude * np.exp(-np.sum((k - target) ** 2, axis=-1) / (2 * width**2))
    else:
        def f(k):
            return amplitude * np.exp(-((np.linalg.norm(k, axis=-1) - k0) ** 2) / (2 * width**2))

    return CoherentProfile.from_physical(f, ell)


def gaussian_energy(amplitude: complex = 1.0, center=(0.0, 0.0, 0.0), width: float = 0.5,
                    consts: PhysicalConstants = NATURAL) -> float:
    """Closed form of hbar c int dk |k| |f(k)|^2 for the Gaussian physical profile.

    With C = |center| and s = width the radial integral gives
    pi s^2 |A|^2 (sqrt(pi) s (C^2 + s^2/2) erf(C/s) + s^2 C exp(-C^2/s^2)) / C,
    which tends to 2 pi |A|^2 s^4 as C -> 0.
    """
    C = float(np.linalg.norm(center))
    s = float(width)
    a2 = abs(amplitude) ** 2
    if C < 1e-8 * s:
        val = 2 * np.pi * s**4
    else:
        val = np.pi * s**2 / C * (np.sqrt(np.pi) * s * (C**2 + s**2 / 2) * erf(C / s) + s**2 * C * np.exp(-(C / s) ** 2))
    return consts.hbar * consts.c * a2 * val


def coherent_field(profile: CoherentProfile, grid: QuadratureGrid, space: OscillatorSpace) -> KField:
    F = profile.values(grid.nodes)
    truncation_guard(F, space.cutoff)
    v = coherent_amplitudes(F, space.cutoff)
    return KField(grid, v / np.linalg.norm(v, axis=1, keepdims=True))


def free_hamiltonian(space: OscillatorSpace, consts: PhysicalConstants = NATURAL) -> DiagonalOperator:
    hc = consts.hbar * consts.c
    return DiagonalOperator.from_terms([(lambda n: hc * np.linalg.norm(n, axis=-1), space.number)])


def normalization_factor(k_abs, ell: float = 1.0):
    """N0(k) = sqrt((2 pi)^3 2 |k| ell)."""
    return np.sqrt((2 * np.pi) ** 3 * 2 * np.asarray(k_abs, dtype=float) * ell)


def phase(k, x) -> np.ndarray:
    """k_mu x^mu with k^0 = |k|, metric (+,-,-,-)."""
    k = np.atleast_2d(np.asarray(k, dtype=float))
    x = np.asarray(x, dtype=float)
    return np.linalg.norm(k, axis=-1) * x[0] - k @ x[1:]


def covariant_k(k) -> np.ndarray:
    """Lower-index four-vector (|k|, -k) for each node."""
    k = np.atleast_2d(np.asarray(k, dtype=float))
    return np.column_stack([np.linalg.norm(k, axis=-1), -k])


@dataclass(frozen=True)
class ScalarFieldOperatorSample:
    x: np.ndarray
    nodes: np.ndarray
    matrices: np.ndarray


def _field_matrices(nodes, x, space, ell, mu=None):
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    if np.any(np.linalg.norm(nodes, axis=-1) == 0):
        raise DomainError("field operators are undefined at k = 0")
    e = np.exp(-1j * phase(nodes, x)) / normalization_factor(np.linalg.norm(nodes, axis=-1), ell)
    # d_mu e^{-ikx} = -i k_mu e^{-ikx}
    if mu is None:
        cm, cp = e, np.conj(e)
    else:
        km = covariant_k(nodes)[:, mu]
        cm, cp = -1j * km * e, 1j * km * np.conj(e)
    return cm[:, None, None] * space.a + cp[:, None, None] * space.adag


def field_operator(x, nodes, space: OscillatorSpace, consts: PhysicalConstants = NATURAL,
                   mu: int | None = None) -> ScalarFieldOperatorSample:
    """phi_k(x) = (e^{-ikx} a + e^{ikx} a^dagger) / N0(k) at each node.

    With ``mu`` set, returns the analytic derivative d/dx^mu instead.
    """
    x = np.asarray(x, dtype=float)
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    return ScalarFieldOperatorSample(x, nodes, _field_matrices(nodes, x, space, consts.ell, mu))


def field_operator_diagonal(x, space: OscillatorSpace, consts: PhysicalConstants = NATURAL) -> DiagonalOperator:
    return DiagonalOperator.from_rule(space.dim, lambda n: _field_matrices(n, x, space, consts.ell))


def commutator_check(x, y, k, space: OscillatorSpace, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """[phi_k(x), phi_k(y)] minus the predicted c-number times identity."""
    k = np.asarray(k, dtype=float).reshape(1, 3)
    px = field_operator(x, k, space, consts).matrices[0]
    py = field_operator(y, k, space, consts).matrices[0]
    kn = np.linalg.norm(k)
    dy = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    predicted = 1j * np.sin(phase(k, dy)[0]) / ((2 * np.pi) ** 3 * consts.ell * kn)
    return px @ py - py @ px - predicted * space.identity


def classical_field(profile: CoherentProfile, x, grid: QuadratureGrid, consts: PhysicalConstants = NATURAL) -> float:
    """phi(x) = 2 Re int dk ell^(3/2) f(k) e^{-ikx} / N0(k)."""
    f = profile.physical(grid.nodes)
    n0 = normalization_factor(grid.radii, consts.ell)
    integrand = consts.ell**1.5 * f * np.exp(-1j * phase(grid.nodes, x)) / n0
    return float(2 * np.real(grid.integrate(integrand)))
