"""Wave-vector grids, fields of Hilbert spaces and operators acting on them.

A field assigns a vector of a fixed Hilbert space to every quadrature node in
wave-vector space.  Integrals over k are replaced by weighted sums over the
nodes; every such sum goes through :func:`pairwise_sum` so that the result does
not depend on how the integrand was evaluated (serially or in chunks).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    ContractViolation,
    DimensionMismatch,
    DivergenceError,
    DomainError,
    KernelEvaluationError,
)

DEFAULT_NORMALIZATION_TOL = 1e-9

_threads = 1


def set_default_threads(n: int) -> None:
    """Set the worker count used for node-wise evaluations."""
    global _threads
    if n < 1:
        raise ConfigurationError("thread count must be >= 1")
    _threads = int(n)


def get_default_threads() -> int:
    return _threads


def pairwise_sum(values, axis: int = 0):
    """Sum along ``axis`` with a fixed binary-tree combining order."""
    a = np.moveaxis(np.asarray(values), axis, 0)
    if a.shape[0] == 0:
        return np.zeros(a.shape[1:], dtype=a.dtype)
    while a.shape[0] > 1:
        n = a.shape[0]
        even = n - n % 2
        s = a[0:even:2] + a[1:even:2]
        if n % 2:
            s = np.concatenate([s, a[-1:]], axis=0)
        a = s
    return a[0]


def map_chunks(fn: Callable[[slice], np.ndarray], n: int, threads: int | None = None,
               min_chunk: int = 256) -> np.ndarray:
    """Evaluate ``fn`` on contiguous slices of ``range(n)`` and concatenate in order."""
    threads = _threads if threads is None else threads
    if threads <= 1 or n <= min_chunk:
        return fn(slice(0, n))
    bounds = np.linspace(0, n, threads + 1).astype(int)
    slices = [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(fn, slices))
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class QuadratureGrid:
    """Quadrature nodes in k-space with their volume weights."""

    nodes: np.ndarray
    weights: np.ndarray
    scheme: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3:
            raise DimensionMismatch("grid nodes must have shape (N, 3)")
        if weights.shape != (nodes.shape[0],):
            raise DimensionMismatch("one weight per node required")
        if np.any(weights <= 0):
            raise ConfigurationError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.nodes, axis=1)

    def integrate(self, values) -> complex | float | np.ndarray:
        """Quadrature of node values; extra trailing axes are integrated independently."""
        values = np.asarray(values)
        w = self.weights.reshape((-1,) + (1,) * (values.ndim - 1))
        return pairwise_sum(w * values, axis=0)

    def volume(self) -> float:
        return float(pairwise_sum(self.weights))


def make_grid(K_max: float, n_radial: int, n_polar: int, n_azimuthal: int) -> QuadratureGrid:
    """Product grid over the ball 0 < |k| <= K_max in spherical coordinates.

    Gauss-Legendre in the radius and in cos(theta); the azimuth uses the
    equispaced periodic rule, which is the Gaussian rule for trigonometric
    polynomials.  Weights carry the r^2 sin(theta) Jacobian.
    """
    if not (K_max > 0):
        raise ConfigurationError(f"K_max must be positive, got {K_max}")
    for name, n in (("n_radial", n_radial), ("n_polar", n_polar), ("n_azimuthal", n_azimuthal)):
        if int(n) != n or n < 1:
            raise ConfigurationError(f"{name} must be a positive integer, got {n}")
    xr, wr = np.polynomial.legendre.leggauss(int(n_radial))
    r = 0.5 * K_max * (xr + 1.0)
    wr = 0.5 * K_max * wr * r**2
    ct, wt = np.polynomial.legendre.leggauss(int(n_polar))
    phi = (np.arange(n_azimuthal) + 0.5) * (2.0 * np.pi / n_azimuthal)
    wp = np.full(n_azimuthal, 2.0 * np.pi / n_azimuthal)

    R, CT, PHI = np.meshgrid(r, ct, phi, indexing="ij")
    ST = np.sqrt(1.0 - CT**2)
    nodes = np.stack([R * ST * np.cos(PHI), R * ST * np.sin(PHI), R * CT], axis=-1).reshape(-1, 3)
    weights = (wr[:, None, None] * wt[None, :, None] * wp[None, None, :]).reshape(-1)
    scheme = {"kind": "spherical-gauss", "K_max": float(K_max), "n_radial": int(n_radial),
              "n_polar": int(n_polar), "n_azimuthal": int(n_azimuthal)}
    return QuadratureGrid(nodes, weights, scheme)


def lattice_grid(spacing: float, radius: float, exclude_origin: bool = True) -> QuadratureGrid:
    """Cubic lattice points h*(i, j, l) inside the closed ball of ``radius``.

    Sums and differences of lattice vectors are lattice vectors, which keeps
    momentum-matching constraints exact.  Every node carries weight h^3.
    """
    if not (spacing > 0 and radius > 0):
        raise ConfigurationError("lattice spacing and radius must be positive")
    m = int(math.floor(radius / spacing + 1e-9))
    ax = np.arange(-m, m + 1)
    I, J, L = np.meshgrid(ax, ax, ax, indexing="ij")
    idx = np.stack([I, J, L], axis=-1).reshape(-1, 3)
    r2 = (idx**2).sum(axis=1)
    keep = r2 * spacing**2 <= radius**2 * (1 + 1e-12)
    if exclude_origin:
        keep &= r2 > 0
    idx = idx[keep]
    nodes = idx * spacing
    weights = np.full(len(idx), spacing**3)
    scheme = {"kind": "lattice", "spacing": float(spacing), "radius": float(radius),
              "exclude_origin": bool(exclude_origin)}
    return QuadratureGrid(nodes, weights, scheme)


@dataclass(frozen=True)
class KField:
    """A state vector of dimension ``dim`` at every grid node."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=complex)
        if values.ndim != 2:
            raise DimensionMismatch("field values must have shape (N, d)")
        if values.shape[0] != len(self.grid):
            raise DimensionMismatch(
                f"field has {values.shape[0]} node values but grid has {len(self.grid)} nodes")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @classmethod
    def constant(cls, grid: QuadratureGrid, vector) -> "KField":
        vector = np.asarray(vector, dtype=complex)
        return cls(grid, np.broadcast_to(vector, (len(grid), vector.size)))

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)

    def with_values(self, values) -> "KField":
        return KField(self.grid, values)


def is_properly_normalized(fld: KField, tol: float = DEFAULT_NORMALIZATION_TOL) -> bool:
    if len(fld.grid) == 0 or fld.dim == 0:
        raise DomainError("empty field")
    return bool(np.max(np.abs(fld.norms() - 1.0)) <= tol)


@dataclass(frozen=True)
class DiagonalOperator:
    """Operator acting node-wise as k -> A_k.

    Either ``terms``, a sequence of (coefficient, matrix) pairs with
    A_k = sum_i c_i(k) M_i, or a ``rule`` mapping an (N, 3) node array to the
    stacked (N, d, d) matrices.
    """

    dim: int
    terms: tuple = ()
    rule: Callable[[np.ndarray], np.ndarray] | None = None

    @classmethod
    def constant(cls, matrix) -> "DiagonalOperator":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(matrix.shape[0], ((1.0, matrix),))

    @classmethod
    def from_terms(cls, terms: Sequence) -> "DiagonalOperator":
        terms = tuple((c, np.asarray(m, dtype=complex)) for c, m in terms)
        dims = {m.shape for _, m in terms}
        if len(dims) != 1:
            raise DimensionMismatch("all term matrices must share one shape")
        d = terms[0][1].shape[0]
        return cls(d, terms)

    @classmethod
    def from_rule(cls, dim: int, rule) -> "DiagonalOperator":
        return cls(dim, (), rule)

    @staticmethod
    def _coef(c, nodes):
        if callable(c):
            return np.asarray(c(nodes), dtype=complex).reshape(len(nodes))
        return np.full(len(nodes), complex(c))

    def matrices(self, nodes) -> np.ndarray:
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        if self.rule is not None:
            return np.asarray(self.rule(nodes), dtype=complex)
        out = np.zeros((len(nodes), self.dim, self.dim), dtype=complex)
        for c, m in self.terms:
            out += self._coef(c, nodes)[:, None, None] * m
        return out

    def apply_values(self, nodes, values) -> np.ndarray:
        values = np.asarray(values, dtype=complex)
        if values.shape[-1] != self.dim:
            raise DimensionMismatch(f"operator dimension {self.dim} vs field dimension {values.shape[-1]}")
        if self.rule is not None:
            return np.einsum("nij,nj->ni", self.matrices(nodes), values)
        out = np.zeros_like(values)
        for c, m in self.terms:
            out += self._coef(c, nodes)[:, None] * (values @ m.T)
        return out

    def adjoint(self) -> "DiagonalOperator":
        if self.rule is not None:
            rule = self.rule
            return DiagonalOperator.from_rule(self.dim, lambda n: np.conj(np.swapaxes(rule(n), -1, -2)))
        terms = []
        for c, m in self.terms:
            cc = (lambda f: (lambda n: np.conj(f(n))))(c) if callable(c) else np.conj(c)
            terms.append((cc, m.conj().T))
        return DiagonalOperator(self.dim, tuple(terms))

    def __add__(self, other: "DiagonalOperator") -> "DiagonalOperator":
        if other.dim != self.dim:
            raise DimensionMismatch("cannot add operators of different dimension")
        if self.rule is None and other.rule is None:
            return DiagonalOperator(self.dim, self.terms + other.terms)
        a, b = self, other
        return DiagonalOperator.from_rule(self.dim, lambda n: a.matrices(n) + b.matrices(n))

    def scaled(self, s) -> "DiagonalOperator":
        if self.rule is not None:
            rule = self.rule
            return DiagonalOperator.from_rule(self.dim, lambda n: s * rule(n))
        return DiagonalOperator(self.dim, tuple(
            ((lambda f: (lambda n: s * f(n)))(c) if callable(c) else s * c, m) for c, m in self.terms))


@dataclass(frozen=True)
class IntegralKernel:
    """Kernel (k, k') -> d x d matrix, vectorized over leading axes.

    ``rule(k, kp)`` receives broadcastable arrays of shape (..., 3) and returns
    (..., d, d).
    """

    dim: int
    rule: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, k, kp) -> np.ndarray:
        return np.asarray(self.rule(np.asarray(k, dtype=float), np.asarray(kp, dtype=float)), dtype=complex)

    def tabulate(self, grid: QuadratureGrid) -> np.ndarray:
        """Dense (N, N, d, d) table of kernel values on all node pairs."""
        try:
            table = self(grid.nodes[:, None, :], grid.nodes[None, :, :])
        except Exception as exc:  # noqa: BLE001 - re-raised with context
            raise KernelEvaluationError(f"kernel evaluation failed: {exc}") from exc
        table = np.broadcast_to(table, (len(grid), len(grid), self.dim, self.dim))
        if not np.all(np.isfinite(table)):
            bad = np.argwhere(~np.isfinite(table))[0]
            raise KernelEvaluationError(f"non-finite kernel value at node pair ({bad[0]}, {bad[1]})")
        return table


def separable_kernel(eta: Callable[[np.ndarray], np.ndarray], dim: int) -> IntegralKernel:
    """Rank-one kernel J(k, k') = |eta_k><eta_k'|."""

    def rule(k, kp):
        a = np.asarray(eta(k), dtype=complex)
        b = np.asarray(eta(kp), dtype=complex)
        return a[..., :, None] * np.conj(b[..., None, :])

    return IntegralKernel(dim, rule)


def apply_diagonal(op: DiagonalOperator, fld: KField) -> KField:
    if op.dim != fld.dim:
        raise DimensionMismatch(f"operator dimension {op.dim} vs field dimension {fld.dim}")
    nodes = fld.grid.nodes
    out = map_chunks(lambda s: op.apply_values(nodes[s], fld.values[s]), len(nodes))
    return fld.with_values(out)


def apply_integral(kernel: IntegralKernel, fld: KField) -> KField:
    """[J zeta]_k = sum_j w_j J(k, k_j) zeta_j over the field's grid."""
    if kernel.dim != fld.dim:
        raise DimensionMismatch(f"kernel dimension {kernel.dim} vs field dimension {fld.dim}")
    table = kernel.tabulate(fld.grid)
    terms = np.einsum("ijab,jb->ija", table, fld.values) * fld.grid.weights[None, :, None]
    return fld.with_values(pairwise_sum(terms, axis=1))


def compose_kernels(J: IntegralKernel, L: IntegralKernel, grid: QuadratureGrid) -> IntegralKernel:
    """Kernel of the product J L, with the inner k' integral done on ``grid``."""
    if J.dim != L.dim:
        raise DimensionMismatch("kernels must share a dimension")
    nodes, w = grid.nodes, grid.weights

    def rule(k, kpp):
        k = np.asarray(k, dtype=float)[..., None, :]
        kpp = np.asarray(kpp, dtype=float)[..., None, :]
        prod = J(k, nodes) @ L(nodes, kpp)
        return pairwise_sum(prod * w[:, None, None], axis=-3)

    return IntegralKernel(J.dim, rule)


def _integrand(op, fld: KField) -> np.ndarray:
    if isinstance(op, DiagonalOperator):
        image = apply_diagonal(op, fld).values
    elif isinstance(op, IntegralKernel):
        image = apply_integral(op, fld).values
    else:
        raise TypeError(f"unsupported operator type {type(op).__name__}")
    return np.einsum("ni,ni->n", np.conj(fld.values), image)


def expectation(op, fld: KField, ell: float = 1.0, tol: float = DEFAULT_NORMALIZATION_TOL) -> complex:
    """Quantum expectation ell^3 * integral dk <zeta_k | (A zeta)_k>."""
    if not is_properly_normalized(fld, tol):
        dev = float(np.max(np.abs(fld.norms() - 1.0)))
        raise ContractViolation(f"field is not properly normalized (max deviation {dev:.3e} > {tol:.1e})")
    value = ell**3 * fld.grid.integrate(_integrand(op, fld))
    if not np.isfinite(value):
        raise DivergenceError("expectation quadrature is not finite")
    return complex(value)


def field_inner(eta: KField, zeta: KField) -> complex:
    """Quadrature of the node-wise inner products <eta_k|zeta_k>."""
    if eta.grid is not zeta.grid and not np.array_equal(eta.grid.nodes, zeta.grid.nodes):
        raise DimensionMismatch("fields live on different grids")
    return complex(eta.grid.integrate(np.einsum("ni,ni->n", np.conj(eta.values), zeta.values)))


def check_isometry(op: DiagonalOperator, fld: KField, tol: float = 1e-12) -> bool:
    image = apply_diagonal(op, fld)
    return bool(np.max(np.abs(image.norms() - fld.norms())) <= tol)
