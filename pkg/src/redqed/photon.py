"""Transverse photons in the radiation gauge.

Every wave vector carries a two-dimensional oscillator, one mode per
polarization. The polarization vectors are the first two rows of a rotation
taking the wave vector onto the positive z axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .boson import coherent_amplitudes, truncation_guard, ladder, normalization_factor, phase
from .constants import NATURAL, PhysicalConstants
from .errors import ConfigurationError, DomainError
from .kspace import DiagonalOperator, KField, QuadratureGrid, expectation

DEFAULT_PHOTON_CUTOFF = 8
POLARIZATIONS = ("H", "V", "circular+", "circular-")


def rotation_to_z(k) -> np.ndarray:
    """Rotations Xi(k) with Xi k = |k| e3, vectorized to shape (N, 3, 3).

    The minimal rotation about k x e3 is used; k along -e3 maps to
    diag(1, -1, -1), a half turn about e1. Rows are re-orthogonalized so that
    transversality holds to rounding.
    """
    k = np.atleast_2d(np.asarray(k, dtype=float))
    norm = np.linalg.norm(k, axis=-1)
    if np.any(norm == 0) or not np.all(np.isfinite(norm)):
        raise DomainError("polarization basis needs a finite nonzero wave vector")
    khat = k / norm[:, None]
    c = khat[:, 2]
    v = np.cross(khat, np.array([0.0, 0.0, 1.0]))
    vx = np.zeros((len(k), 3, 3))
    vx[:, 0, 1], vx[:, 0, 2], vx[:, 1, 2] = -v[:, 2], v[:, 1], -v[:, 0]
    vx = vx - np.swapaxes(vx, 1, 2)
    antipodal = 1 + c < 1e-12
    denom = np.where(antipodal, 1.0, 1 + c)
    R = np.eye(3) + vx + vx @ vx / denom[:, None, None]
    R[antipodal] = np.diag([1.0, -1.0, -1.0])

    eh = R[:, 0] - np.sum(R[:, 0] * khat, axis=1)[:, None] * khat
    eh /= np.linalg.norm(eh, axis=1)[:, None]
    ev = np.cross(khat, eh)
    return np.stack([eh, ev, khat], axis=1)


@dataclass(frozen=True)
class PolarizationBasis:
    k: np.ndarray
    xi: np.ndarray

    @property
    def eps_h(self) -> np.ndarray:
        return self.xi[0]

    @property
    def eps_v(self) -> np.ndarray:
        return self.xi[1]

    @property
    def khat(self) -> np.ndarray:
        return self.xi[2]


def polarization_basis(k_ph) -> PolarizationBasis:
    k_ph = np.asarray(k_ph, dtype=float).reshape(3)
    return PolarizationBasis(k_ph, rotation_to_z(k_ph)[0])


@dataclass(frozen=True)
class TwoModeOscSpace:
    """Tensor product of the H and V oscillators, |n_H, n_V> at n_H*(cv+1)+n_V."""

    cutoff_h: int = DEFAULT_PHOTON_CUTOFF
    cutoff_v: int = DEFAULT_PHOTON_CUTOFF

    def __post_init__(self):
        ladder(self.cutoff_h)
        ladder(self.cutoff_v)

    @property
    def dim(self) -> int:
        return (self.cutoff_h + 1) * (self.cutoff_v + 1)

    @property
    def a_h(self) -> np.ndarray:
        return np.kron(ladder(self.cutoff_h), np.eye(self.cutoff_v + 1))

    @property
    def a_v(self) -> np.ndarray:
        return np.kron(np.eye(self.cutoff_h + 1), ladder(self.cutoff_v))

    @property
    def number(self) -> np.ndarray:
        return self.a_h.conj().T @ self.a_h + self.a_v.conj().T @ self.a_v

    @property
    def spin(self) -> np.ndarray:
        """-i (a_H^dagger a_V - a_V^dagger a_H); (|1,0> + i|0,1>)/sqrt 2 has eigenvalue +1."""
        ah, av = self.a_h, self.a_v
        return -1j * (ah.conj().T @ av - av.conj().T @ ah)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def ket(self, nh: int, nv: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[nh * (self.cutoff_v + 1) + nv] = 1.0
        return v

    def safe_mask(self, level_h: int, level_v: int) -> np.ndarray:
        """Boolean mask of basis states with n_H <= level_h and n_V <= level_v."""
        nh, nv = np.divmod(np.arange(self.dim), self.cutoff_v + 1)
        return (nh <= level_h) & (nv <= level_v)


def _mode_coefficients(nodes, x, consts, mu=None):
    """Coefficients of a and a^dagger in lambda/(2 N0) (e^{-ikx} a + e^{ikx} a^dagger).

    ``mu`` selects the analytic derivative d/dx^mu.
    """
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    kn = np.linalg.norm(nodes, axis=-1)
    e = consts.lam / (2 * normalization_factor(kn, consts.ell)) * np.exp(-1j * phase(nodes, x))
    if mu is None:
        return e, np.conj(e)
    kmu = kn if mu == 0 else -nodes[:, mu - 1]
    return -1j * kmu * e, 1j * kmu * np.conj(e)


def _assemble(eps_h, eps_v, cm, cp, space):
    ah, av = space.a_h, space.a_v
    out = (eps_h * cm[:, None])[:, :, None, None] * ah + (eps_h * cp[:, None])[:, :, None, None] * ah.conj().T
    out += (eps_v * cm[:, None])[:, :, None, None] * av + (eps_v * cp[:, None])[:, :, None, None] * av.conj().T
    return out


def vector_potential_op(x, nodes, space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL,
                        mu: int | None = None) -> np.ndarray:
    """Spatial components A_alpha at each node, shape (N, 3, d, d). A_0 vanishes."""
    x = np.asarray(x, dtype=float)
    xi = rotation_to_z(nodes)
    cm, cp = _mode_coefficients(nodes, x, consts, mu)
    return _assemble(xi[:, 0], xi[:, 1], cm, cp, space)


def e_b_operators(x, nodes, space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL):
    """E_alpha = -c d_0 A_alpha and B = curl A, each of shape (N, 3, d, d)."""
    E = -consts.c * vector_potential_op(x, nodes, space, consts, mu=0)
    dA = np.stack([vector_potential_op(x, nodes, space, consts, mu=b) for b in (1, 2, 3)], axis=1)
    # B_a = eps_abc d_b A_c
    B = np.stack([dA[:, 1, 2] - dA[:, 2, 1], dA[:, 2, 0] - dA[:, 0, 2], dA[:, 0, 1] - dA[:, 1, 0]], axis=1)
    return E, B


def gauss_residual(x, nodes, space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """Node-wise operator norm of sum_alpha d_alpha E_alpha."""
    div = 0
    for a in (1, 2, 3):
        div = div + (-consts.c) * _second_derivative_component(x, nodes, space, consts, a)
    return np.linalg.norm(div, ord=2, axis=(1, 2))


def _second_derivative_component(x, nodes, space, consts, alpha):
    # d_alpha d_0 A_alpha, analytic in the phases
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    xi = rotation_to_z(nodes)
    cm, cp = _mode_coefficients(nodes, x, consts, mu=0)
    kmu = -nodes[:, alpha - 1]
    cm, cp = -1j * kmu * cm, 1j * kmu * cp
    return _assemble(xi[:, 0, alpha - 1:alpha], xi[:, 1, alpha - 1:alpha], cm, cp, space)[:, 0]


def em_hamiltonian(space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL) -> DiagonalOperator:
    hc = consts.hbar * consts.c
    return DiagonalOperator.from_terms([(lambda n: hc * np.linalg.norm(n, axis=-1), space.number)])


def heisenberg_residual(x, nodes, space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """i hbar c d_0 A_alpha - [A_alpha, H] at each node, shape (N, 3, d, d)."""
    A = vector_potential_op(x, nodes, space, consts)
    dA = vector_potential_op(x, nodes, space, consts, mu=0)
    H = em_hamiltonian(space, consts).matrices(nodes)[:, None]
    return 1j * consts.hbar * consts.c * dA - (A @ H - H @ A)


def a_commutator_check(x, y, k_ph, space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """[A_alpha(x), A_beta(y)] minus the predicted c-number, shape (3, 3, d, d)."""
    k = np.asarray(k_ph, dtype=float).reshape(1, 3)
    Ax = vector_potential_op(x, k, space, consts)[0]
    Ay = vector_potential_op(y, k, space, consts)[0]
    comm = Ax[:, None] @ Ay[None, :] - Ay[None, :] @ Ax[:, None]
    basis = polarization_basis(k[0])
    proj = np.outer(basis.eps_h, basis.eps_h) + np.outer(basis.eps_v, basis.eps_v)
    dx = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    scal = -1j * consts.lam**2 * np.sin(phase(k, dx)[0]) / ((2 * np.pi) ** 3 * 4 * np.linalg.norm(k) * consts.ell)
    return comm - scal * proj[:, :, None, None] * space.identity


def coherent_photon_field(f1: Callable, f2: Callable, grid: QuadratureGrid, space: TwoModeOscSpace,
                          ell: float = 1.0) -> KField:
    """zeta_k = |F1(k), F2(k)> with F_i = ell^(-3/2) f_i."""
    F1 = np.asarray(f1(grid.nodes), dtype=complex) * ell**-1.5
    F2 = np.asarray(f2(grid.nodes), dtype=complex) * ell**-1.5
    truncation_guard(F1, space.cutoff_h)
    truncation_guard(F2, space.cutoff_v)
    vh = coherent_amplitudes(F1, space.cutoff_h)
    vv = coherent_amplitudes(F2, space.cutoff_v)
    vals = np.einsum("ni,nj->nij", vh, vv).reshape(len(grid), -1)
    return KField(grid, vals / np.linalg.norm(vals, axis=1, keepdims=True))


@dataclass(frozen=True)
class SinglePhotonProfile:
    rho: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray], np.ndarray] = lambda k: np.zeros(len(k))
    polarization: str = "H"

    def __post_init__(self):
        if self.polarization not in POLARIZATIONS:
            raise ConfigurationError(f"unknown polarization {self.polarization!r}; expected one of {POLARIZATIONS}")


def single_photon_field(profile: SinglePhotonProfile, grid: QuadratureGrid, space: TwoModeOscSpace) -> KField:
    """Node-wise superposition sqrt(rho) e^{i phi}|photon> + sqrt(1 - rho)|0,0>."""
    rho = np.asarray(profile.rho(grid.nodes), dtype=float).reshape(len(grid))
    if not np.all(np.isfinite(rho)) or np.any(rho < 0) or np.any(rho > 1):
        raise DomainError("single-photon density must lie in [0, 1]")
    phi = np.asarray(profile.phi(grid.nodes), dtype=float).reshape(len(grid))
    one = {
        "H": space.ket(1, 0),
        "V": space.ket(0, 1),
        "circular+": (space.ket(1, 0) + 1j * space.ket(0, 1)) / np.sqrt(2),
        "circular-": (space.ket(1, 0) - 1j * space.ket(0, 1)) / np.sqrt(2),
    }[profile.polarization]
    vals = (np.sqrt(rho) * np.exp(1j * phi))[:, None] * one + np.sqrt(1 - rho)[:, None] * space.ket(0, 0)
    return KField(grid, vals)


def photon_energy(fld: KField, space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL) -> float:
    return float(expectation(em_hamiltonian(space, consts), fld, ell=consts.ell).real)


def photon_spin(fld: KField, space: TwoModeOscSpace, ell: float = 1.0) -> float:
    return float(expectation(DiagonalOperator.constant(space.spin), fld, ell=ell).real)


def mode_expectations(fld: KField, space: TwoModeOscSpace) -> tuple[np.ndarray, np.ndarray]:
    """Node-wise <a_H> and <a_V>."""
    v = fld.values
    return (np.einsum("ni,ni->n", np.conj(v), v @ space.a_h.T),
            np.einsum("ni,ni->n", np.conj(v), v @ space.a_v.T))


def _classical(fld, x, space, consts, mu=None):
    # <A> = sum_pol eps (c_- <a> + c_+ <a^dagger>) = 2 Re(c_- <a>) eps
    nodes = fld.grid.nodes
    xi = rotation_to_z(nodes)
    cm, _ = _mode_coefficients(nodes, x, consts, mu)
    zh, zv = mode_expectations(fld, space)
    integrand = 2 * np.real(cm * zh)[:, None] * xi[:, 0] + 2 * np.real(cm * zv)[:, None] * xi[:, 1]
    return consts.ell**3 * np.asarray(fld.grid.integrate(integrand), dtype=float)


def classical_vector_potential(fld: KField, x, space: TwoModeOscSpace,
                               consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """ell^3 int dk (zeta, A_alpha(x) zeta)_k for alpha = 1..3."""
    return _classical(fld, np.asarray(x, dtype=float), space, consts)


def classical_fields(fld: KField, x, space: TwoModeOscSpace, consts: PhysicalConstants = NATURAL):
    """Expectations of E and B at x, each a real 3-vector."""
    x = np.asarray(x, dtype=float)
    E = -consts.c * _classical(fld, x, space, consts, mu=0)
    dA = np.stack([_classical(fld, x, space, consts, mu=b) for b in (1, 2, 3)])
    B = np.array([dA[1, 2] - dA[2, 1], dA[2, 0] - dA[0, 2], dA[0, 1] - dA[1, 0]])
    return E, B
