"""Fermion fields: the scalar Larmor model and the four-mode Dirac field.

The Dirac field lives on the 16-dimensional Fock space of four fermionic
modes (electron and positron, two spins each). Plane-wave factors are kept
symbolic as phase labels so that spatial integrals reduce to momentum
matching.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .constants import NATURAL, PhysicalConstants
from .errors import ConstructionError, DomainError, UnsupportedError
from .kspace import DiagonalOperator, KField, QuadratureGrid

SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
# basis (absent, present); sigma_+ removes the fermion
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def dispersion(k, kappa: float = 1.0, c: float = 1.0):
    """omega(k) = c sqrt(kappa^2 + |k|^2)."""
    if kappa < 0:
        raise DomainError("kappa must be non-negative")
    k = np.asarray(k, dtype=float)
    return c * np.sqrt(kappa**2 + np.sum(k**2, axis=-1))


def fermion_normalization(k, consts: PhysicalConstants = NATURAL):
    """N(k) = sqrt((2 pi)^3 2 ell omega / c)."""
    return np.sqrt((2 * np.pi) ** 3 * 2 * consts.ell * dispersion(k, consts.kappa, consts.c) / consts.c)


def four_momentum(k, kappa: float = 1.0) -> np.ndarray:
    """Lower-index k_mu = (omega/c, -k) on the mass shell, shape (N, 4)."""
    k = np.atleast_2d(np.asarray(k, dtype=float))
    return np.column_stack([np.sqrt(kappa**2 + np.sum(k**2, axis=-1)), -k])


def larmor_hamiltonian(omega: float, hbar: float = 1.0) -> np.ndarray:
    return -0.5 * hbar * omega * SIGMA[2]


def larmor_check(omega: float, t: float, hbar: float = 1.0) -> np.ndarray:
    """e^{iHt/hbar} sigma_1 e^{-iHt/hbar} - (sigma_1 cos wt + sigma_2 sin wt)."""
    U = expm(-1j * larmor_hamiltonian(omega, hbar) * t / hbar)
    evolved = U.conj().T @ SIGMA[0] @ U
    return evolved - (SIGMA[0] * np.cos(omega * t) + SIGMA[1] * np.sin(omega * t))


def scalar_fermion_hamiltonian(consts: PhysicalConstants = NATURAL) -> DiagonalOperator:
    """H_k = (hbar omega / 2)(I - sigma_3): zero when empty, hbar omega when occupied."""
    return DiagonalOperator.from_terms(
        [(lambda n: 0.5 * consts.hbar * dispersion(n, consts.kappa, consts.c), np.eye(2) - SIGMA[2])])


def scalar_fermion_ops(x, k, consts: PhysicalConstants = NATURAL):
    """Positive- and negative-frequency parts (phi+, phi-) at each node, each (N, 2, 2)."""
    k = np.atleast_2d(np.asarray(k, dtype=float))
    x = np.asarray(x, dtype=float)
    e = np.exp(-1j * four_momentum(k, consts.kappa) @ x) / fermion_normalization(k, consts)
    return e[:, None, None] * SIGMA_PLUS, np.conj(e)[:, None, None] * SIGMA_MINUS


@dataclass(frozen=True)
class FermionProfile:
    rho: Callable[[np.ndarray], np.ndarray]
    chi: Callable[[np.ndarray], np.ndarray] = lambda k: np.zeros(len(k))
    xi: Callable[[np.ndarray], np.ndarray] = lambda k: np.zeros(len(k))

    def evaluate(self, nodes):
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        rho = np.asarray(self.rho(nodes), dtype=float).reshape(len(nodes))
        if not np.all(np.isfinite(rho)) or np.any(rho < 0) or np.any(rho > 1):
            raise DomainError("fermion density must lie in [0, 1]")
        chi = np.asarray(self.chi(nodes), dtype=float).reshape(len(nodes))
        xi = np.asarray(self.xi(nodes), dtype=float).reshape(len(nodes))
        return rho, chi, xi


def scalar_fermion_field(profile: FermionProfile, grid: QuadratureGrid) -> KField:
    rho, chi, xi = profile.evaluate(grid.nodes)
    return KField(grid, np.column_stack([np.sqrt(1 - rho) * np.exp(1j * chi), np.sqrt(rho) * np.exp(1j * xi)]))


def scalar_classical_field(profile: FermionProfile, x, grid: QuadratureGrid,
                           consts: PhysicalConstants = NATURAL) -> float:
    """ell^3 int dk sqrt(rho(1-rho)) 2 Re e^{-i(chi - xi)} e^{-ikx} / N(k)."""
    rho, chi, xi = profile.evaluate(grid.nodes)
    phase = four_momentum(grid.nodes, consts.kappa) @ np.asarray(x, dtype=float)
    vals = np.sqrt(rho * (1 - rho)) * 2 * np.real(np.exp(-1j * (chi - xi)) * np.exp(-1j * phase))
    return float(consts.ell**3 * grid.integrate(vals / fermion_normalization(grid.nodes, consts)))


# ---------------------------------------------------------------- Clifford-16

def subset_index(subset) -> int:
    """Basis index of |Lambda>; mode 1 is the most significant bit."""
    return sum(1 << (4 - s) for s in set(subset))


def index_subset(index: int) -> tuple:
    return tuple(s for s in range(1, 5) if index & (1 << (4 - s)))


@dataclass(frozen=True)
class Clifford16:
    """Jordan-Wigner matrices; ``plus[s-1]`` annihilates mode s, ``minus[s-1]`` creates it.

    The sign string sits on the modes above s, so ordered creation
    sigma_4^- ... sigma_1^- |0> lands on a basis vector with sign +1.
    """

    plus: np.ndarray
    minus: np.ndarray

    @property
    def number(self) -> np.ndarray:
        return self.minus @ self.plus

    def ket(self, subset=()) -> np.ndarray:
        v = np.zeros(16, dtype=complex)
        v[subset_index(subset)] = 1.0
        return v

    def charge(self, q_el: float = 1.0) -> np.ndarray:
        N = self.number
        return q_el * (N[0] + N[1] - N[2] - N[3])

    def hamiltonian(self, omega: float, hbar: float = 1.0) -> np.ndarray:
        return hbar * omega * self.number.sum(axis=0)


def clifford_generators() -> Clifford16:
    Z, I2 = SIGMA[2].real, np.eye(2)
    plus = []
    for s in range(4):
        factors = [I2] * s + [SIGMA_PLUS.real] + [Z] * (3 - s)
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        plus.append(m)
    plus = np.array(plus, dtype=complex)
    return Clifford16(plus, np.conj(np.swapaxes(plus, 1, 2)))


CLIFFORD = clifford_generators()

# mode operators multiplying the spinor columns u1, u2, v3, v4, and their phase labels:
# label lam means the factor e^{-i lam k_mu x^mu}
MODE_OPS = np.array([CLIFFORD.plus[0], CLIFFORD.plus[1], CLIFFORD.minus[2], CLIFFORD.minus[3]])
MODE_LABELS = np.array([1, 1, -1, -1])


def anticommutator(a, b):
    return a @ b + b @ a


# ---------------------------------------------------------------- gamma matrices and spinors

def gamma_matrices() -> np.ndarray:
    """Standard representation, upper index: gamma^0 = diag(I, -I), gamma^a = [[0, s_a], [-s_a, 0]]."""
    g = np.zeros((4, 4, 4), dtype=complex)
    g[0] = np.diag([1, 1, -1, -1])
    for a in range(3):
        g[a + 1, :2, 2:] = SIGMA[a]
        g[a + 1, 2:, :2] = -SIGMA[a]
    return g


GAMMA = gamma_matrices()
CHARGE_CONJUGATION = 1j * GAMMA[2] @ GAMMA[0]


def slash(k_lower) -> np.ndarray:
    """gamma^mu k_mu for lower-index four-vectors, shape (N, 4, 4)."""
    return np.einsum("nm,mij->nij", np.atleast_2d(k_lower), GAMMA)


@dataclass(frozen=True)
class SpinorSet:
    """Spinors at each node; ``W[n]`` has columns u1, u2, v3, v4."""

    k: np.ndarray
    W: np.ndarray
    kappa: float

    @property
    def u1(self):
        return self.W[:, :, 0]

    @property
    def u2(self):
        return self.W[:, :, 1]

    @property
    def v3(self):
        return self.W[:, :, 2]

    @property
    def v4(self):
        return self.W[:, :, 3]


def solve_spinors(k, consts: PhysicalConstants = NATURAL, kappa: float | None = None) -> SpinorSet:
    """Boosted spinors u^(s) ~ (chi_s, sigma.k/(k0 + kappa) chi_s), v = i gamma^2 conj(u)."""
    kappa = consts.kappa if kappa is None else kappa
    if not kappa > 0:
        raise UnsupportedError("massless fermions are not supported")
    k = np.atleast_2d(np.asarray(k, dtype=float))
    if not np.all(np.isfinite(k)):
        raise DomainError("wave vectors must be finite")
    k0 = np.sqrt(kappa**2 + np.sum(k**2, axis=1))
    sk = np.einsum("na,aij->nij", k, SIGMA)
    lower = sk / (k0 + kappa)[:, None, None]
    norm = np.sqrt((k0 + kappa) / (2 * k0))
    u = np.zeros((len(k), 4, 2), dtype=complex)
    u[:, :2] = np.eye(2)
    u[:, 2:] = lower
    u *= norm[:, None, None]
    ig2 = 1j * GAMMA[2]
    v4 = np.einsum("ij,nj->ni", ig2, np.conj(u[:, :, 0]))
    v3 = np.einsum("ij,nj->ni", ig2, np.conj(u[:, :, 1]))
    W = np.stack([u[:, :, 0], u[:, :, 1], v3, v4], axis=2)
    return SpinorSet(k, W, kappa)


def spinor_residuals(spinors: SpinorSet) -> dict:
    """Maximum residuals of the eigen, orthonormality and C-mapping relations."""
    kl = four_momentum(spinors.k, spinors.kappa)
    S = slash(kl)
    W = spinors.W
    sign = np.array([1, 1, -1, -1])
    eig = S @ W - spinors.kappa * W * sign
    minus = solve_spinors(-spinors.k, kappa=spinors.kappa).W
    gram = np.conj(np.swapaxes(W, 1, 2)) @ W
    ortho_uu = gram[:, :2, :2] - np.eye(2)
    ortho_vv = gram[:, 2:, 2:] - np.eye(2)
    ortho_uv = np.conj(np.swapaxes(W[:, :, :2], 1, 2)) @ minus[:, :, 2:]
    Cu1 = np.einsum("ij,nj->ni", CHARGE_CONJUGATION, np.conj(W[:, :, 0])) - minus[:, :, 3]
    Cu2 = np.einsum("ij,nj->ni", CHARGE_CONJUGATION, np.conj(W[:, :, 1])) - minus[:, :, 2]
    return {
        "eigen": float(np.max(np.abs(eig))),
        "orthonormal": float(max(np.max(np.abs(ortho_uu)), np.max(np.abs(ortho_vv)))),
        "u_v_minus_k": float(np.max(np.abs(ortho_uv))),
        "charge_conjugation": float(max(np.max(np.abs(Cu1)), np.max(np.abs(Cu2)))),
        "condition": float(np.max(np.linalg.cond(W))),
    }


# ---------------------------------------------------------------- Dirac field operators

def dirac_field_ops(x, k, consts: PhysicalConstants = NATURAL, mu: int | None = None,
                    spinors: SpinorSet | None = None) -> np.ndarray:
    """psi_{r,k}(x) for r = 1..4 at each node, shape (N, 4, 16, 16).

    With ``mu`` set, the analytic derivative d/dx^mu is returned.
    """
    k = np.atleast_2d(np.asarray(k, dtype=float))
    spinors = solve_spinors(k, consts) if spinors is None else spinors
    kl = four_momentum(k, consts.kappa)
    ph = np.exp(-1j * MODE_LABELS[None, :] * (kl @ np.asarray(x, dtype=float))[:, None])
    if mu is not None:
        ph = ph * (-1j * MODE_LABELS[None, :] * kl[:, mu][:, None])
    coef = spinors.W * ph[:, None, :] / (2 * np.pi) ** 1.5
    return np.einsum("nrm,mij->nrij", coef, MODE_OPS)


def dirac_adjoint(psi: np.ndarray) -> np.ndarray:
    """psi-bar_r = sum_r' psi_r'^dagger gamma^0_{r'r}, acting on the (..., 4, 16, 16) stack."""
    dag = np.conj(np.swapaxes(psi, -1, -2))
    return np.einsum("...sij,sr->...rij", dag, GAMMA[0])


def dirac_equation_residual(x, k, consts: PhysicalConstants = NATURAL) -> float:
    """max |i gamma^mu d_mu psi - kappa psi| over nodes and matrix entries."""
    psi = dirac_field_ops(x, k, consts)
    lhs = sum(1j * np.einsum("rs,nsij->nrij", GAMMA[m], dirac_field_ops(x, k, consts, mu=m)) for m in range(4))
    return float(np.max(np.abs(lhs - consts.kappa * psi)))


def klein_gordon_residual(x, k, consts: PhysicalConstants = NATURAL) -> float:
    """max |(box + kappa^2) psi| from the analytic second derivatives."""
    k = np.atleast_2d(np.asarray(k, dtype=float))
    kl = four_momentum(k, consts.kappa)
    # d_mu d^mu on each phase gives -k_mu k^mu = -kappa^2
    box = -np.einsum("nm,mm,nm->n", kl, METRIC, kl)
    psi = dirac_field_ops(x, k, consts)
    return float(np.max(np.abs((box + consts.kappa**2)[:, None, None, None] * psi)))


def dirac_heisenberg_residual(x, k, consts: PhysicalConstants = NATURAL) -> float:
    """max |i hbar c d_0 psi - [psi, H_el]| with H_el = hbar omega sum_s N_s."""
    k = np.atleast_2d(np.asarray(k, dtype=float))
    psi = dirac_field_ops(x, k, consts)
    dpsi = dirac_field_ops(x, k, consts, mu=0)
    H = dispersion(k, consts.kappa, consts.c)[:, None, None, None] * consts.hbar * CLIFFORD.number.sum(axis=0)
    return float(np.max(np.abs(1j * consts.hbar * consts.c * dpsi - (psi @ H - H @ psi))))


def field_car_residual(x, y, k, kp, consts: PhysicalConstants = NATURAL) -> float:
    """Anticommutators of phi^(+)_{s,k}(x) and phi^(-)_{t,k'}(y) against the prediction.

    The predicted amplitude is 1/(N(k) N(k')) delta_st e^{-ikx} e^{ik'y}.
    """
    k = np.asarray(k, dtype=float).reshape(1, 3)
    kp = np.asarray(kp, dtype=float).reshape(1, 3)
    ex = np.exp(-1j * four_momentum(k, consts.kappa)[0] @ np.asarray(x, dtype=float)) / fermion_normalization(k, consts)[0]
    ey = np.exp(1j * four_momentum(kp, consts.kappa)[0] @ np.asarray(y, dtype=float)) / fermion_normalization(kp, consts)[0]
    worst = 0.0
    for s, t in product(range(4), repeat=2):
        p_s, m_t = ex * CLIFFORD.plus[s], ey * CLIFFORD.minus[t]
        expected = (s == t) * ex * ey * np.eye(16)
        worst = max(worst, np.max(np.abs(anticommutator(p_s, m_t) - expected)))
        p_t = CLIFFORD.plus[t] * ey
        worst = max(worst, np.max(np.abs(anticommutator(p_s, p_t))))
    return float(worst)


# ---------------------------------------------------------------- charge conjugation

@dataclass(frozen=True)
class ChargeConjugation:
    C: np.ndarray
    Cc: np.ndarray
    residual: float


def charge_conjugation_residual(Cc, x, k, consts: PhysicalConstants = NATURAL) -> float:
    """Residual of Cc psi_r Cc^-1 = -sum C psi-bar and Cc psi-bar_r Cc^-1 = sum C psi."""
    psi = dirac_field_ops(x, k, consts)
    bar = dirac_adjoint(psi)
    inv = np.linalg.inv(Cc)
    lhs1 = Cc @ psi @ inv
    rhs1 = -np.einsum("rs,nsij->nrij", CHARGE_CONJUGATION, bar)
    lhs2 = Cc @ bar @ inv
    rhs2 = np.einsum("rs,nsij->nrij", CHARGE_CONJUGATION, psi)
    return float(max(np.max(np.abs(lhs1 - rhs1)), np.max(np.abs(lhs2 - rhs2))))


def construct_charge_conjugation(consts: PhysicalConstants = NATURAL, samples: int = 8,
                                 seed: int = 0) -> ChargeConjugation:
    """Solve X psi - P X = 0 over sampled (x, k) for the 16x16 operator Cc.

    The sampled field operators span the constraint space; the solution is
    unique up to a scalar, fixed by unitarity and Cc^dagger = -Cc.
    """
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(samples, 4))
    ks = rng.normal(size=(samples, 3))
    eye = np.eye(16)
    rows = []
    for x, k in zip(xs, ks):
        psi = dirac_field_ops(x, k, consts)[0]
        bar = dirac_adjoint(psi)
        P1 = -np.einsum("rs,sij->rij", CHARGE_CONJUGATION, bar)
        P2 = np.einsum("rs,sij->rij", CHARGE_CONJUGATION, psi)
        # row-major vec(A X B) = (A kron B^T) vec(X)
        for r in range(4):
            rows.append(np.kron(eye, psi[r].T) - np.kron(P1[r], eye))
            rows.append(np.kron(eye, bar[r].T) - np.kron(P2[r], eye))
    A = np.vstack(rows)
    _, sv, vh = np.linalg.svd(A, full_matrices=False)
    null = sv < 1e-10 * sv[0]
    if null.sum() != 1:
        raise ConstructionError(f"charge-conjugation constraints have a {int(null.sum())}-dimensional solution space")
    X = np.conj(vh[null][0]).reshape(16, 16)
    X = X / np.sqrt(np.real(np.trace(X.conj().T @ X)) / 16)
    # fix the global phase so that X^dagger = -X
    nz = np.unravel_index(np.argmax(np.abs(X)), X.shape)
    ref = X[nz] / abs(X[nz])
    X = X / ref
    if np.max(np.abs(X.conj().T + X)) > 1e-8:
        X = X * 1j
    if np.max(np.abs(X.conj().T + X)) > 1e-8 or np.max(np.abs(X.conj().T @ X - eye)) > 1e-8:
        raise ConstructionError("charge-conjugation solution is not unitary and anti-hermitian")
    X = np.round(X.real, 12) + 1j * np.round(X.imag, 12)
    worst = max(charge_conjugation_residual(X, x, k, consts) for x, k in zip(xs, ks))
    return ChargeConjugation(CHARGE_CONJUGATION, X, worst)


# ---------------------------------------------------------------- currents

@dataclass(frozen=True)
class CurrentKernel:
    """J^mu_{k,k'}(x) = sum_(a,b) terms[mu][(a, b)] e^{-i (a k_mu + b k'_mu) x^mu}.

    Labels a, b in {+1, -1}; the spatial integral of a term is (2 pi)^3
    delta(a k + b k').
    """

    k: np.ndarray
    kp: np.ndarray
    kappa: float
    terms: tuple

    def evaluate(self, x, mu: int) -> np.ndarray:
        kl = four_momentum(self.k, self.kappa)[0]
        kpl = four_momentum(self.kp, self.kappa)[0]
        x = np.asarray(x, dtype=float)
        out = np.zeros((16, 16), dtype=complex)
        for (a, b), M in self.terms[mu].items():
            out += np.exp(-1j * (a * kl + b * kpl) @ x) * M
        return out


def current_kernel(k, kp, consts: PhysicalConstants = NATURAL) -> CurrentKernel:
    """Dirac current between wave vectors k and k' with psi-bar as the adjoint.

    J = (q c / 2)[sum gamma^mu_{rr'} psibar_{r,k} psi_{r',k'} - sum gamma^mu_{r'r} psi_{r,k} psibar_{r',k'}].
    """
    k = np.asarray(k, dtype=float).reshape(1, 3)
    kp = np.asarray(kp, dtype=float).reshape(1, 3)
    Wk = solve_spinors(k, consts).W[0]
    Wkp = solve_spinors(kp, consts).W[0]
    pref = 0.5 * consts.q_el * consts.c / (2 * np.pi) ** 3
    dag = np.conj(np.swapaxes(MODE_OPS, 1, 2))
    terms = []
    for mu in range(4):
        g0g = GAMMA[0] @ GAMMA[mu]
        G1 = Wk.conj().T @ g0g @ Wkp
        G2 = Wkp.conj().T @ g0g @ Wk
        acc = {}
        for m, n in product(range(4), repeat=2):
            lm, ln = MODE_LABELS[m], MODE_LABELS[n]
            key1 = (-int(lm), int(ln))
            acc[key1] = acc.get(key1, 0) + pref * G1[m, n] * (dag[m] @ MODE_OPS[n])
            key2 = (int(ln), -int(lm))
            acc[key2] = acc.get(key2, 0) - pref * G2[m, n] * (MODE_OPS[n] @ dag[m])
        terms.append(acc)
    return CurrentKernel(k[0], kp[0], consts.kappa, tuple(terms))


def total_charge(consts: PhysicalConstants = NATURAL, k=(0.3, -0.2, 0.5)) -> dict:
    """Spatial integral of J^0 / c, split by momentum-matching delta.

    Returns the 16x16 coefficient of delta(k - k') (evaluated at k' = k) and
    the largest entry of the coefficient of delta(k + k') (at k' = -k).
    """
    k = np.asarray(k, dtype=float)
    same = current_kernel(k, k, consts).terms[0]
    diag = sum(M for (a, b), M in same.items() if a == -b) * (2 * np.pi) ** 3 / consts.c
    opposite = current_kernel(k, -k, consts).terms[0]
    cross = sum(M for (a, b), M in opposite.items() if a == b) * (2 * np.pi) ** 3 / consts.c
    return {"Q": diag, "cross": float(np.max(np.abs(cross)))}


# ---------------------------------------------------------------- Dirac k-fields and two-point current

def electron_field(profile: FermionProfile, grid: QuadratureGrid, occupied=(1,)) -> KField:
    """zeta_k = sqrt(1 - rho) e^{i chi}|empty> + sqrt(rho) e^{i xi}|occupied>."""
    rho, chi, xi = profile.evaluate(grid.nodes)
    vals = np.zeros((len(grid), 16), dtype=complex)
    vals[:, 0] = np.sqrt(1 - rho) * np.exp(1j * chi)
    vals[:, subset_index(occupied)] += np.sqrt(rho) * np.exp(1j * xi)
    return KField(grid, vals)


def electron_hamiltonian(consts: PhysicalConstants = NATURAL) -> DiagonalOperator:
    return DiagonalOperator.from_terms(
        [(lambda n: consts.hbar * dispersion(n, consts.kappa, consts.c), CLIFFORD.number.sum(axis=0))])


def _smeared_field(fld: KField, x, consts, mu=None):
    """Phi_r(x) = sum_k w_k psi_{r,k}(x) zeta_k, shape (4, 16)."""
    grid = fld.grid
    psi = dirac_field_ops(x, grid.nodes, consts, mu=mu)
    return np.einsum("n,nrij,nj->ri", grid.weights, psi, fld.values)


def two_point_current(fld: KField, x, consts: PhysicalConstants = NATURAL, diagonal: bool = False) -> np.ndarray:
    """r^mu(x) = Tr gamma^mu G(x, x), complex array of length 4.

    G is the double integral over (k, k'). With ``diagonal`` only the paired
    k = k' contributions are kept, ell^3 int dk <psi_k zeta_k| g0 g^mu |psi_k zeta_k>,
    which is independent of x for the vacuum.
    """
    g0g = np.array([GAMMA[0] @ GAMMA[m] for m in range(4)])
    if diagonal:
        grid = fld.grid
        phi = np.einsum("nrij,nj->nri", dirac_field_ops(x, grid.nodes, consts), fld.values)
        vals = np.einsum("nri,mrs,nsi->nm", np.conj(phi), g0g, phi)
        return consts.ell**3 * grid.integrate(vals)
    phi = _smeared_field(fld, x, consts)
    gram = np.conj(phi) @ phi.T
    return consts.ell**3 * np.einsum("mrs,rs->m", g0g, gram)


def classical_dirac_field(fld: KField, x, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """phi^cl_r(x) = ell^3 int dk <zeta_k | psi_{r,k}(x) zeta_k>."""
    psi = dirac_field_ops(x, fld.grid.nodes, consts)
    vals = np.einsum("ni,nrij,nj->nr", np.conj(fld.values), psi, fld.values)
    return consts.ell**3 * fld.grid.integrate(vals)


def continuity_residual(fld: KField, x, h: float, consts: PhysicalConstants = NATURAL) -> float:
    """Central-difference d_mu r^mu at x with step h."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for m in range(4):
        e = np.zeros(4)
        e[m] = h
        total += (two_point_current(fld, x + e, consts)[m] - two_point_current(fld, x - e, consts)[m]) / (2 * h)
    return float(abs(total))
