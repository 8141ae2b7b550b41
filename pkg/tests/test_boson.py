import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from redqed import boson as bo
from redqed import kspace as ks
from redqed.constants import PhysicalConstants
from redqed.errors import ConfigurationError, DomainError, TruncationError

# N0 at |k| = 1, ell = 1: sqrt(2 (2 pi)^3)
N0_UNIT = 22.27331198732683
# exact rational <a^dagger a> for |1> cut at 30 levels (series evaluated with fractions)
MEAN_N_Z1_N30 = 1.0
# ||a|z> - z|z>|| for z = 1+i, cutoff 40 (mpmath, 40 digits)
RESIDUAL_Z1I_N40 = 6.039457022611026e-19


@pytest.fixture(scope="module")
def grid():
    return ks.make_grid(2.0, 10, 8, 8)


def test_ladder_action():
    sp = bo.OscillatorSpace(6)
    for n in range(6):
        np.testing.assert_allclose(sp.a @ sp.fock(n + 1), np.sqrt(n + 1) * sp.fock(n))
        np.testing.assert_allclose(sp.adag @ sp.fock(n), np.sqrt(n + 1) * sp.fock(n + 1))


def test_commutator_is_identity_below_top():
    sp = bo.OscillatorSpace(12)
    comm = sp.a @ sp.adag - sp.adag @ sp.a
    np.testing.assert_allclose(comm[:-1, :-1], np.eye(12), atol=1e-14)
    assert comm[-1, -1] == pytest.approx(-12)
    np.testing.assert_array_equal(np.linalg.eigvalsh(sp.adag @ sp.a).round(12), np.arange(13))


@pytest.mark.parametrize("cutoff", [0, -3, 2.5])
def test_bad_cutoff(cutoff):
    with pytest.raises(ConfigurationError):
        bo.OscillatorSpace(cutoff)


def test_vacuum_coherent_state():
    sp = bo.OscillatorSpace(10)
    np.testing.assert_array_equal(bo.coherent_state(0, sp), sp.fock(0))


def test_coherent_mean_number():
    sp = bo.OscillatorSpace(30)
    v = bo.coherent_state(1.0, sp)
    assert abs(np.vdot(v, sp.number @ v).real - MEAN_N_Z1_N30) < 1e-10


def test_coherent_eigen_residual():
    sp = bo.OscillatorSpace(40)
    z = 1 + 1j
    v = bo.coherent_state(z, sp)
    res = np.linalg.norm(sp.a @ v - z * v)
    assert res < 1e-8
    assert res == pytest.approx(RESIDUAL_Z1I_N40, rel=1e-6)
    assert bo.coherent_residual_bound(z, sp) == pytest.approx(res, rel=1e-12)


def test_truncation_guard():
    with pytest.raises(TruncationError):
        bo.coherent_state(3.0, bo.OscillatorSpace(32))
    with pytest.raises(DomainError):
        bo.coherent_state(np.nan, bo.OscillatorSpace(32))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2.8), st.floats(-np.pi, np.pi))
def test_coherent_normalized(r, theta):
    v = bo.coherent_state(r * np.exp(1j * theta), bo.OscillatorSpace(32))
    assert abs(np.linalg.norm(v) - 1) < 1e-12


def test_coherent_field_vacuum(grid):
    sp = bo.OscillatorSpace(8)
    fld = bo.coherent_field(bo.CoherentProfile(lambda k: np.zeros(len(k))), grid, sp)
    np.testing.assert_array_equal(fld.values, np.tile(sp.fock(0), (len(grid), 1)))


def test_coherent_field_gaussian(grid):
    sp = bo.OscillatorSpace(24)
    prof = bo.gaussian_profile(1.2 - 0.5j, center=(0.3, 0, 0.2), width=0.6)
    fld = bo.coherent_field(prof, grid, sp)
    assert ks.is_properly_normalized(fld, tol=1e-12)
    F = prof.values(grid.nodes)
    res = np.linalg.norm(fld.values @ sp.a.T - F[:, None] * fld.values, axis=1)
    bounds = [bo.coherent_residual_bound(z, sp) for z in F]
    assert np.all(res <= np.array(bounds) * (1 + 1e-9) + 1e-15)


def test_coherent_field_guard(grid):
    with pytest.raises(TruncationError):
        bo.coherent_field(bo.gaussian_profile(5.0), grid, bo.OscillatorSpace(8))


def test_free_hamiltonian_values():
    sp = bo.OscillatorSpace(5)
    consts = PhysicalConstants(hbar=0.7, c=2.0)
    H = bo.free_hamiltonian(sp, consts)
    k = np.array([[0.0, 0.6, 0.8]])
    Hk = H.matrices(k)[0]
    assert np.vdot(sp.fock(0), Hk @ sp.fock(0)) == 0
    assert np.vdot(sp.fock(1), Hk @ sp.fock(1)).real == pytest.approx(1.4)
    assert np.all(np.linalg.eigvalsh(Hk) >= 0)


@pytest.mark.parametrize("prof", [
    bo.gaussian_profile(1.0, width=0.5),
    bo.gaussian_profile(0.8j, center=(0.5, -0.2, 0.1), width=0.4),
    bo.shell_profile(1.0, amplitude=0.9, width=0.2),
])
def test_energy_correspondence(grid, prof):
    sp = bo.OscillatorSpace(32)
    fld = bo.coherent_field(prof, grid, sp)
    quantum = ks.expectation(bo.free_hamiltonian(sp), fld)
    f = prof.physical(grid.nodes)
    classical = grid.integrate(grid.radii * np.abs(f) ** 2)
    assert quantum.real == pytest.approx(classical, rel=1e-10)
    assert abs(quantum.imag) < 1e-12


def test_normalization_factor():
    assert bo.normalization_factor(1.0) == pytest.approx(N0_UNIT, rel=1e-12)


def test_field_operator_hermitian_and_vacuum():
    sp = bo.OscillatorSpace(10)
    nodes = np.random.default_rng(0).normal(size=(20, 3))
    M = bo.field_operator([0.3, 1.0, -2.0, 0.5], nodes, sp).matrices
    np.testing.assert_allclose(M, np.conj(np.swapaxes(M, 1, 2)), atol=1e-15)
    assert np.all(M[:, 0, 0] == 0)


def test_field_operator_coherent_expectation():
    sp = bo.OscillatorSpace(32)
    k = np.array([[0.2, -0.4, 0.9]])
    x = np.array([0.7, 0.1, 0.5, -1.2])
    z = 0.9 * np.exp(0.4j)
    v = bo.coherent_state(z, sp)
    val = np.vdot(v, bo.field_operator(x, k, sp).matrices[0] @ v)
    n0 = bo.normalization_factor(np.linalg.norm(k))
    expected = 2 / n0 * np.real(z * np.exp(-1j * bo.phase(k, x)[0]))
    assert val.real == pytest.approx(expected, abs=1e-14)


def test_field_operator_rejects_origin():
    with pytest.raises(DomainError):
        bo.field_operator(np.zeros(4), np.zeros((1, 3)), bo.OscillatorSpace(3))


def test_commutator_trivial_cases():
    sp = bo.OscillatorSpace(20)
    k = [0.3, 0.1, -0.5]
    x = np.array([0.4, 1.0, 2.0, 3.0])
    assert np.all(bo.commutator_check(x, x, k, sp) == 0)
    y = x + np.array([0.0, 0, 0, 0])
    assert np.all(bo.commutator_check(x, y, k, sp) == 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_commutator_random(seed):
    rng = np.random.default_rng(seed)
    sp = bo.OscillatorSpace(20)
    res = bo.commutator_check(rng.normal(size=4) * 3, rng.normal(size=4) * 3, rng.normal(size=3) + 0.1, sp)
    assert np.max(np.abs(res[:16, :16])) < 1e-12


def _dalembert(f, x, h):
    total = 0.0
    for mu, sign in zip(range(4), (1, -1, -1, -1)):
        e = np.zeros(4)
        e[mu] = h
        total = total + sign * (f(x + e) - 2 * f(x) + f(x - e)) / h**2
    return total


def test_operator_dalembert_second_order():
    sp = bo.OscillatorSpace(4)
    k = np.array([[0.8, -0.3, 0.5]])
    x = np.array([0.2, 0.4, -0.1, 0.3])

    def elem(y):
        return bo.field_operator(y, k, sp).matrices[0, 1, 2]

    r1 = abs(_dalembert(elem, x, 1e-2))
    r2 = abs(_dalembert(elem, x, 5e-3))
    assert r1 < 1e-5
    assert r1 / r2 == pytest.approx(4.0, rel=0.05)


def test_analytic_derivative_matches_finite_difference():
    sp = bo.OscillatorSpace(4)
    k = np.array([[0.8, -0.3, 0.5]])
    x = np.array([0.2, 0.4, -0.1, 0.3])
    h = 1e-5
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        fd = (bo.field_operator(x + e, k, sp).matrices - bo.field_operator(x - e, k, sp).matrices) / (2 * h)
        np.testing.assert_allclose(bo.field_operator(x, k, sp, mu=mu).matrices, fd, atol=1e-10)


def test_classical_field_zero(grid):
    assert bo.classical_field(bo.CoherentProfile(lambda k: np.zeros(len(k))), np.zeros(4), grid) == 0


def test_classical_shell_wave(grid):
    prof = bo.shell_profile(1.2, amplitude=0.8, width=0.1, direction=(0, 0, 1))
    x = np.array([0.3, 0.1, -0.2, 0.4])

    def phi(y):
        return bo.classical_field(prof, y, grid)

    r1 = abs(_dalembert(phi, x, 4e-2))
    r2 = abs(_dalembert(phi, x, 2e-2))
    assert r1 / r2 == pytest.approx(4.0, rel=0.1)

    # travelling wave: one period in time at frequency c k0 returns close to the start
    period = 2 * np.pi / 1.2
    assert abs(phi(x + np.array([period, 0, 0, period]))) == pytest.approx(abs(phi(x)), rel=0.05)


def test_expectation_matches_classical(grid):
    sp = bo.OscillatorSpace(32)
    prof = bo.gaussian_profile(1.1 + 0.3j, center=(0.2, 0.1, 0.5), width=0.5)
    fld = bo.coherent_field(prof, grid, sp)
    for x in ([0, 0, 0, 0], [0.5, 1.0, -0.3, 0.2], [2.0, 0, 1.5, -1.0]):
        quantum = ks.expectation(bo.field_operator_diagonal(np.array(x, float), sp), fld)
        assert quantum.real == pytest.approx(bo.classical_field(prof, np.array(x, float), grid), abs=1e-10)


# hbar c int |k| |f|^2 for A = 0.8, center (0.5, -0.2, 0.1), width 0.4 (scipy dblquad, frozen)
GAUSS_ENERGY_ORACLE = 0.1577742538098756


def test_gaussian_energy_closed_form():
    assert bo.gaussian_energy(0.8, (0.5, -0.2, 0.1), 0.4) == pytest.approx(GAUSS_ENERGY_ORACLE, rel=1e-13)
    assert bo.gaussian_energy(1.0, (0, 0, 0), 0.5) == pytest.approx(2 * np.pi * 0.5**4, rel=1e-15)
    # continuous through the centred limit
    assert bo.gaussian_energy(1.0, (1e-6, 0, 0), 0.5) == pytest.approx(2 * np.pi * 0.5**4, rel=1e-10)
    scaled = bo.gaussian_energy(0.8, (0.5, 0, 0), 0.4, PhysicalConstants(hbar=2.0, c=3.0))
    assert scaled == pytest.approx(6 * bo.gaussian_energy(0.8, (0.5, 0, 0), 0.4), rel=1e-15)


def test_coherent_energy_converges_to_closed_form():
    A, c, s = 0.8, (0.5, -0.2, 0.1), 0.4
    sp = bo.OscillatorSpace(32)
    exact = bo.gaussian_energy(A, c, s)
    errs = []
    for nr in (8, 16, 32):
        g = ks.make_grid(np.linalg.norm(c) + 7 * s, nr, 32, 32)
        fld = bo.coherent_field(bo.gaussian_profile(A, c, s), g, sp)
        errs.append(abs(ks.expectation(bo.free_hamiltonian(sp), fld).real / exact - 1))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6
