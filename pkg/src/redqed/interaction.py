"""Coupled photon and electron/positron fields on paired wave-vector grids.

A product state assigns to every node pair (k_ph, k) a vector in
H_em (x) H_16, stored as ``values[p, n]`` with photon index major:
``index = photon_index * 16 + clifford_index``.

The interaction Hamiltonian is applied matrix-free.  The spatial integral of
A_alpha J^alpha produces momentum deltas delta(s k_ph + a k + b k'), where
s = +1 for photon absorption, s = -1 for emission and (a, b) are the phase
labels of the current kernel.  For each source node the matched partner is
k' = -b (s k_ph + a k), looked up on the k-grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .boson import normalization_factor
from .constants import NATURAL, PhysicalConstants
from .errors import ConfigurationError, ContractViolation, DimensionMismatch, DomainError
from .fermion import CLIFFORD, GAMMA, MODE_LABELS, MODE_OPS, dispersion, solve_spinors, subset_index
from .kspace import QuadratureGrid, pairwise_sum
from .photon import TwoModeOscSpace, rotation_to_z

INTERACTION_PHOTON_SPACE = TwoModeOscSpace(1, 1)
CLIFFORD_DIM = 16
MATCH_COMBOS = tuple(product((1, -1), (1, -1), (1, -1)))
"""(s, a, b) triples: photon absorption/emission and the two current phase labels."""

_DAG = np.conj(np.swapaxes(MODE_OPS, 1, 2))


def _bilinears():
    """Operator parts o_m^dagger o_n (term 1) and -o_n o_m^dagger (term 2), shape (4, 4, 16, 16)."""
    b1 = np.einsum("mij,njk->mnik", _DAG, MODE_OPS)
    b2 = -np.einsum("nij,mjk->mnik", MODE_OPS, _DAG)
    return b1, b2


_BILINEARS = _bilinears()


def _label_masks(a: int, b: int):
    lm = MODE_LABELS[:, None]
    ln = MODE_LABELS[None, :]
    mask1 = (-lm == a) & (ln == b)
    mask2 = (ln == a) & (-lm == b)
    return mask1, mask2


def current_blocks(Wk, Wkp, a: int, b: int, weights, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """Phase-label (a, b) term of sum_alpha w_alpha J^alpha_{k,k'} for many pairs.

    ``Wk``, ``Wkp`` are spinor matrices of shape (M, 4, 4) and ``weights`` has
    shape (M, 3) (typically a polarization vector).  Returns (M, 16, 16).
    """
    weights = np.asarray(weights)
    g0g = np.einsum("ij,ajk->ajk", GAMMA[0], GAMMA[1:])
    contracted = np.einsum("Ma,aij->Mij", weights, g0g)
    G1 = np.einsum("Mim,Mij,Mjn->Mmn", Wk.conj(), contracted, Wkp)
    G2 = np.einsum("Mim,Mij,Mjn->Mmn", Wkp.conj(), contracted, Wk)
    mask1, mask2 = _label_masks(a, b)
    b1, b2 = _BILINEARS
    pref = 0.5 * consts.q_el * consts.c / (2 * np.pi) ** 3
    out = np.einsum("Mmn,mnij->Mij", G1 * mask1, b1)
    out += np.einsum("Mmn,mnij->Mij", G2 * mask2, b2)
    return pref * out


# ---------------------------------------------------------------- state space

def product_index(nh: int, nv: int, subset=(), space: TwoModeOscSpace = INTERACTION_PHOTON_SPACE) -> int:
    """Flat index of |nh, nv, subset> in H_em (x) H_16."""
    if not (0 <= nh <= space.cutoff_h and 0 <= nv <= space.cutoff_v):
        raise DomainError("photon occupation outside the truncated space")
    return (nh * (space.cutoff_v + 1) + nv) * CLIFFORD_DIM + subset_index(subset)


@dataclass(frozen=True)
class ProductState:
    """Field over node pairs (k_ph, k) with values of shape (N_ph, N_k, dim_em * 16)."""

    kph_grid: QuadratureGrid
    k_grid: QuadratureGrid
    values: np.ndarray
    space: TwoModeOscSpace = INTERACTION_PHOTON_SPACE

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=complex)
        expected = (len(self.kph_grid), len(self.k_grid), self.space.dim * CLIFFORD_DIM)
        if values.shape != expected:
            raise DimensionMismatch(f"product state has shape {values.shape}, expected {expected}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def basis(cls, kph_grid, k_grid, nh=0, nv=0, subset=(), space=INTERACTION_PHOTON_SPACE):
        """The same basis vector |nh, nv, subset> at every node pair."""
        v = np.zeros((len(kph_grid), len(k_grid), space.dim * CLIFFORD_DIM), dtype=complex)
        v[..., product_index(nh, nv, subset, space)] = 1.0
        return cls(kph_grid, k_grid, v, space)

    @classmethod
    def vacuum(cls, kph_grid, k_grid, space=INTERACTION_PHOTON_SPACE):
        return cls.basis(kph_grid, k_grid, 0, 0, (), space)

    def with_values(self, values) -> "ProductState":
        return ProductState(self.kph_grid, self.k_grid, values, self.space)

    def node_norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=-1)

    def is_properly_normalized(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.node_norms() - 1.0) <= tol))

    def component(self, nh: int, nv: int, subset=()) -> np.ndarray:
        return self.values[..., product_index(nh, nv, subset, self.space)]

    def inner(self, other: "ProductState", ell: float = 1.0) -> complex:
        """ell^6 sum_{p,n} w_p w_n <self|other> with a fixed reduction order."""
        _check_compatible(self, other)
        local = np.einsum("pni,pni->pn", self.values.conj(), other.values)
        w = self.kph_grid.weights[:, None] * self.k_grid.weights[None, :]
        return complex(ell**6 * pairwise_sum((w * local).ravel()))

    def norm(self, ell: float = 1.0) -> float:
        return float(np.sqrt(max(self.inner(self, ell).real, 0.0)))


def _check_compatible(x: ProductState, y: ProductState):
    if x.values.shape != y.values.shape:
        raise DimensionMismatch("product states live on different grids or spaces")


# ---------------------------------------------------------------- momentum matching

@dataclass(frozen=True)
class MomentumMatchRule:
    """Matched partner nodes for every (k_ph node, combo, k node).

    ``targets[p, c, n]`` is the k-grid index of k' = -b (s k_ph + a k) for
    combo ``MATCH_COMBOS[c]`` or -1 when no node lies within ``resolution``.
    ``errors`` holds the snapping distance of every accepted match.
    """

    targets: np.ndarray
    errors: np.ndarray
    resolution: float

    @classmethod
    def build(cls, kph_grid: QuadratureGrid, k_grid: QuadratureGrid, resolution: float = 1e-9):
        if not resolution > 0:
            raise ConfigurationError("matching resolution must be positive")
        if np.any(kph_grid.radii == 0):
            raise DomainError("photon wave vectors must be non-zero")
        tree = cKDTree(k_grid.nodes)
        kph = kph_grid.nodes
        k = k_grid.nodes
        targets = np.full((len(kph), len(MATCH_COMBOS), len(k)), -1, dtype=np.int64)
        errors = np.zeros(targets.shape)
        for c, (s, a, b) in enumerate(MATCH_COMBOS):
            exact = -b * (s * kph[:, None, :] + a * k[None, :, :])
            dist, idx = tree.query(exact.reshape(-1, 3))
            dist = dist.reshape(len(kph), len(k))
            idx = idx.reshape(len(kph), len(k))
            ok = dist <= resolution
            targets[:, c] = np.where(ok, idx, -1)
            errors[:, c] = np.where(ok, dist, 0.0)
        targets.setflags(write=False)
        errors.setflags(write=False)
        return cls(targets, errors, float(resolution))

    @property
    def max_snap_error(self) -> float:
        return float(self.errors.max(initial=0.0))

    @property
    def unmatched_fraction(self) -> float:
        return float(np.mean(self.targets < 0))

    def leakage(self, state: ProductState, ell: float = 1.0) -> float:
        """Relative weight of amplitude coupled to partners outside the k-grid.

        sqrt(sum_{p,n} f_{p,n} w_p w_n |zeta_{p,n}|^2) / ||zeta|| where f is the
        fraction of the eight match combos without a partner node.
        """
        miss = np.mean(self.targets < 0, axis=1)
        w = state.kph_grid.weights[:, None] * state.k_grid.weights[None, :]
        lost = ell**6 * pairwise_sum((w * miss * state.node_norms() ** 2).ravel())
        total = state.norm(ell)
        return float(np.sqrt(lost) / total) if total > 0 else 0.0


# ---------------------------------------------------------------- Hamiltonian

@dataclass
class InteractionModel:
    """Paired grids, constants and cached tables for the assembled Hamiltonian.

    H = H^ph + H^el + H^I with H^ph = hbar c |k_ph| (N_H + N_V),
    H^el = hbar omega(k) sum_s N_s and H^I = int dx A_alpha J^alpha at x^0 = 0.
    """

    kph_grid: QuadratureGrid
    k_grid: QuadratureGrid
    consts: PhysicalConstants = NATURAL
    space: TwoModeOscSpace = INTERACTION_PHOTON_SPACE
    resolution: float = 1e-9
    match: MomentumMatchRule = field(init=False)

    def __post_init__(self):
        self.match = MomentumMatchRule.build(self.kph_grid, self.k_grid, self.resolution)
        self._W = solve_spinors(self.k_grid.nodes, self.consts).W
        self._xi = rotation_to_z(self.kph_grid.nodes)
        kn = self.kph_grid.radii
        self._coupling = (2 * np.pi) ** 3 * self.consts.lam / (2 * normalization_factor(kn, self.consts.ell))
        self._ph_energy = self.consts.hbar * self.consts.c * kn
        self._el_energy = self.consts.hbar * dispersion(self.k_grid.nodes, self.consts.kappa, self.consts.c)
        self._photon_number = np.real(np.diag(self.space.number))
        self._fermion_number = np.real(np.diag(CLIFFORD.number.sum(axis=0)))
        self._charge = np.real(np.diag(CLIFFORD.charge(self.consts.q_el)))

    @property
    def dim(self) -> int:
        return self.space.dim * CLIFFORD_DIM

    def _check(self, state: ProductState):
        if (state.kph_grid is not self.kph_grid and not np.array_equal(state.kph_grid.nodes, self.kph_grid.nodes)) or \
                (state.k_grid is not self.k_grid and not np.array_equal(state.k_grid.nodes, self.k_grid.nodes)):
            raise DimensionMismatch("state grids differ from the model grids")
        if state.space != self.space:
            raise DimensionMismatch("state photon space differs from the model")

    def free_diagonal(self) -> np.ndarray:
        """Eigenvalues of H^ph + H^el at every node pair, shape (N_ph, N_k, dim)."""
        ph = self._ph_energy[:, None] * self._photon_number[None, :]
        el = self._el_energy[:, None] * self._fermion_number[None, :]
        return (ph[:, None, :, None] + el[None, :, None, :]).reshape(len(self.kph_grid), len(self.k_grid), -1)

    def charge_diagonal(self) -> np.ndarray:
        return np.tile(self._charge, self.space.dim)

    def free_action(self, state: ProductState) -> ProductState:
        self._check(state)
        return state.with_values(self.free_diagonal() * state.values)

    def interaction_action(self, state: ProductState, phases: np.ndarray | None = None) -> ProductState:
        """H^I zeta; ``phases[p, n]`` optionally multiplies the source amplitude at (p, n)."""
        self._check(state)
        npair = (len(self.kph_grid), len(self.k_grid))
        z = state.values.reshape(*npair, self.space.dim, CLIFFORD_DIM)
        out = np.zeros_like(z)
        ah, av = self.space.a_h, self.space.a_v
        for p in range(npair[0]):
            eps = self._xi[p, :2]
            for c, (s, a, b) in enumerate(MATCH_COMBOS):
                tgt = self.match.targets[p, c]
                rows = np.nonzero(tgt >= 0)[0]
                if rows.size == 0:
                    continue
                src = tgt[rows]
                Wk = self._W[rows]
                Wkp = self._W[src]
                Z = z[p, src]
                if phases is not None:
                    Z = Z * phases[p, src][:, None, None]
                acc = np.zeros((rows.size, self.space.dim, CLIFFORD_DIM), dtype=complex)
                for e, op in zip(eps, (ah, av)):
                    P = op if s == 1 else op.conj().T
                    J = current_blocks(Wk, Wkp, a, b, np.broadcast_to(e, (rows.size, 3)), self.consts)
                    acc += np.einsum("ij,Mjb,Mcb->Mic", P, Z, J)
                out[p, rows] += self._coupling[p] * acc
        return state.with_values(out.reshape(state.values.shape))

    def apply(self, state: ProductState) -> ProductState:
        """Full H zeta = H^ph zeta + H^el zeta + H^I zeta."""
        free = self.free_action(state)
        inter = self.interaction_action(state)
        return state.with_values(free.values + inter.values)

    def leakage(self, state: ProductState) -> float:
        return self.match.leakage(state, self.consts.ell)


def full_hamiltonian_action(model: InteractionModel, state: ProductState,
                            require_normalized: bool = True, tol: float = 1e-9) -> ProductState:
    """H zeta for a properly normalized state; unmatched momenta are dropped (see ``model.leakage``)."""
    if require_normalized and not state.is_properly_normalized(tol):
        raise ContractViolation("state is not normalized at every node pair")
    return model.apply(state)


# ---------------------------------------------------------------- gauge and charge

GaugeFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _evaluate_gauge(Lambda, kph_nodes, k_nodes) -> np.ndarray:
    vals = Lambda(kph_nodes, k_nodes) if callable(Lambda) else Lambda
    vals = np.broadcast_to(np.asarray(vals, dtype=float), (len(kph_nodes), len(k_nodes)))
    if not np.all(np.isfinite(vals)):
        raise DomainError("gauge function must be finite on the grid")
    return vals


def gauge_transform(Lambda, state: ProductState, q_el: float = 1.0) -> ProductState:
    """[U_Lambda zeta]_{k_ph,k} = exp(i Lambda(k_ph, k) Q) zeta_{k_ph,k}.

    ``Lambda`` is an array of shape (N_ph, N_k) or a callable of the node
    arrays (N_ph, 3), (N_k, 3) returning such an array.
    """
    vals = _evaluate_gauge(Lambda, state.kph_grid.nodes, state.k_grid.nodes)
    q = np.tile(np.real(np.diag(CLIFFORD.charge(q_el))), state.space.dim)
    return state.with_values(np.exp(1j * vals[:, :, None] * q[None, None, :]) * state.values)


def gauge_defect(model: InteractionModel, Lambda, state: ProductState) -> float:
    """|| U^-1 H^I U zeta - H^I zeta ||."""
    q = model.consts.q_el
    rotated = model.interaction_action(gauge_transform(Lambda, state, q))
    vals = _evaluate_gauge(Lambda, state.kph_grid.nodes, state.k_grid.nodes)
    back = gauge_transform(-vals, rotated, q)
    plain = model.interaction_action(state)
    return back.with_values(back.values - plain.values).norm(model.consts.ell)


def constant_gauge(value: float = 1.0) -> GaugeFunction:
    return lambda kph, k: np.full((len(kph), len(k)), float(value))


def _split(kph, k):
    khat = kph / np.linalg.norm(kph, axis=1)[:, None]
    par = np.einsum("na,pa->pn", k, khat)
    perp = np.linalg.norm(k[None, :, :] - par[:, :, None] * khat[:, None, :], axis=-1)
    return par, perp


def transverse_gauge(profile: Callable | None = None) -> GaugeFunction:
    """Lambda(k_ph, |k_perp|); default profile |k_ph| cos(|k_perp|) + |k_perp|^2."""
    if profile is None:
        def profile(kph_abs, perp):
            return kph_abs * np.cos(perp) + perp**2

    def rule(kph, k):
        _, perp = _split(kph, k)
        return profile(np.linalg.norm(kph, axis=1)[:, None], perp)
    return rule


def longitudinal_gauge(scale: float = 1.0) -> GaugeFunction:
    """Lambda = scale * (k . k_ph_hat); violates the admissibility condition."""
    def rule(kph, k):
        par, _ = _split(kph, k)
        return scale * par
    return rule


GAUGE_PRESETS = {
    "constant": constant_gauge,
    "transverse": transverse_gauge,
    "longitudinal": longitudinal_gauge,
}


def charge_conservation_check(model: InteractionModel, state: ProductState) -> float:
    """|| Q H zeta - H Q zeta || evaluated through the action pipeline."""
    q = model.charge_diagonal()
    h_state = model.apply(state)
    hq = model.apply(state.with_values(state.values * q))
    return state.with_values(q * h_state.values - hq.values).norm(model.consts.ell)


def pair_creation_amplitudes(k_ph, k, consts: PhysicalConstants = NATURAL) -> np.ndarray:
    """Coefficients of |1,0,{s,t}> and |0,1,{s,t}> in H zeta for zeta the free vacuum.

    Returns shape (2, 2, 2): [polarization H/V, s in (1, 2), t in (3, 4)] with
    -lambda q c / (4 N0) sum_alpha eps_alpha (<u_s(k)|g v_t(k')> + <u_s(k')|g v_t(k)>),
    k' = -k - k_ph and g = gamma^0 gamma^alpha.  The overall sign is the
    reordering sign sigma_s^- sigma_t^- |0> = -|{s,t}>.
    """
    k_ph = np.asarray(k_ph, dtype=float).reshape(3)
    k = np.asarray(k, dtype=float).reshape(3)
    kp = -k - k_ph
    Wk = solve_spinors(k, consts).W[0]
    Wp = solve_spinors(kp, consts).W[0]
    xi = rotation_to_z(k_ph)[0]
    n0 = normalization_factor(np.linalg.norm(k_ph), consts.ell)
    out = np.zeros((2, 2, 2), dtype=complex)
    for pol in range(2):
        g = sum(xi[pol, al] * GAMMA[0] @ GAMMA[al + 1] for al in range(3))
        m = Wk.conj().T @ g @ Wp + Wp.conj().T @ g @ Wk
        out[pol] = m[:2, 2:]
    return -consts.lam * consts.q_el * consts.c / (4 * n0) * out
