"""Acceptance suite: one test per criterion at its stated tolerance.

Each test prints a single PASS/FAIL line (shown even under output capture)
before asserting.  Run standalone with ``python tests/test_acceptance.py``.
"""
import time
from itertools import product

import numpy as np
import pytest

from redqed import boson as bo
from redqed import boundstate as bs
from redqed import coulomb as co
from redqed import fermion as fe
from redqed import interaction as it
from redqed import kspace as ks
from redqed import photon as ph

EPS = np.finfo(float).eps


def report(capsys, label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


# ---------------------------------------------------------------- criterion bodies

def energy_identity():
    profiles = [
        bs.GaussianAmplitude(0.3, (0.0, 0.0, 0.0), 1.0, 0.5),
        bs.GaussianAmplitude(0.2, (0.5, 0.0, 0.2), 0.7, 0.3, photon_width=1.0),
        bs.GaussianAmplitude(0.5, (0.0, 0.4, 0.0), 1.5, 1.0),
    ]
    pg, kg = ks.make_grid(2.0, 6, 4, 6), ks.make_grid(3.0, 6, 4, 6)
    defects, times = [], []
    for prof in profiles:
        t0 = time.perf_counter()
        e = bs.energies(bs.variational_optimum(prof, pg, kg))
        times.append(time.perf_counter() - t0)
        defects.append(e.identity_defect)
    ok = max(defects) < 1e-10 and max(times) < 30 and len(profiles) >= 3 and 1e3 <= len(pg) * len(kg) <= 3e4
    return ok, f"{len(profiles)} profiles, {len(pg) * len(kg)} pairs, max defect {max(defects):.1e}, max {max(times):.2f} s"


def long_wavelength():
    t0 = time.perf_counter()
    k = np.array([0.3, 0.2, -0.5])
    dirs = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0.3, -1, 0.2], k])
    scan = bs.long_wavelength_scan(k, dirs, np.geomspace(1e-4, 1e-2, 12))
    elapsed = time.perf_counter() - t0
    free = ~scan.parallel
    dev = np.max(np.abs(scan.slopes[free] + 3))
    ok = free.sum() >= 5 and dev < 0.02 and np.all(scan.u_perp_sq[scan.parallel] == 0) and scan.parallel.sum() == 1
    return ok and elapsed < 5, f"{free.sum()} directions, max |slope + 3| {dev:.1e}, parallel exactly 0, {elapsed:.3f} s"


def spinor_suite():
    k = np.random.default_rng(0).normal(size=(1000, 3)) * 3
    t0 = time.perf_counter()
    res = fe.spinor_residuals(fe.solve_spinors(k))
    elapsed = time.perf_counter() - t0
    worst = max(res["eigen"], res["orthonormal"], res["charge_conjugation"])
    return worst < 1e-12 and elapsed < 5, f"1000 k, worst residual {worst:.1e}, {elapsed:.3f} s"


def algebra_suite():
    cl, G = fe.CLIFFORD, fe.GAMMA
    car = all(np.array_equal(fe.anticommutator(cl.plus[s], cl.minus[t]), (s == t) * np.eye(16))
              and np.array_equal(fe.anticommutator(cl.plus[s], cl.plus[t]), np.zeros((16, 16)))
              for s, t in product(range(4), repeat=2))
    gam = all(np.array_equal(fe.anticommutator(G[m], G[n]), 2 * fe.METRIC[m, n] * np.eye(4))
              for m, n in product(range(4), repeat=2))
    sp = bo.OscillatorSpace(20)
    comm = sp.a @ sp.adag - sp.adag @ sp.a
    # entries are sqrt(n) sqrt(n); exact up to the rounding of the square roots
    ccr = np.abs(comm[:-1, :-1] - np.eye(20)).max()
    rng = np.random.default_rng(1)
    scal = max(np.abs(bo.commutator_check(rng.normal(size=4) * 3, rng.normal(size=4) * 3,
                                          rng.normal(size=3) + 0.1, sp)[:12, :12]).max() for _ in range(30))
    tsp = ph.TwoModeOscSpace(16, 16)
    mask = tsp.safe_mask(12, 12)
    phot = max(np.abs(ph.a_commutator_check(rng.normal(size=4) * 2, rng.normal(size=4) * 2,
                                            rng.normal(size=3) + 0.05, tsp)[:, :, mask][:, :, :, mask]).max()
               for _ in range(30))
    ok = car and gam and ccr <= 4 * 20 * EPS and scal < 1e-12 and phot < 1e-12
    return ok, (f"CAR exact {car}, gamma exact {gam}, CCR {ccr:.1e}, scalar commutator {scal:.1e}, "
                f"photon commutator {phot:.1e}")


def transversality_gauss():
    k = np.random.default_rng(2).normal(size=(10_000, 3)) * 2
    kn = np.linalg.norm(k, axis=1)
    xi = ph.rotation_to_z(k)
    trans = max(np.abs(np.einsum("na,na->n", k, xi[:, 0]) / kn).max(),
                np.abs(np.einsum("na,na->n", k, xi[:, 1]) / kn).max())
    gauss = np.max(ph.gauss_residual(np.array([0.3, -0.1, 0.2, 0.5]), k, ph.TwoModeOscSpace(3, 3)))
    return trans < 1e-12 and gauss < 1e-12, f"10000 k_ph, transversality {trans:.1e}, Gauss {gauss:.1e}"


def total_charge():
    rest = fe.total_charge(k=(0.0, 0.0, 0.0))
    exact = np.array_equal(rest["Q"], fe.CLIFFORD.charge()) and rest["cross"] == 0
    worst = 0.0
    for k in np.random.default_rng(3).normal(size=(20, 3)):
        tc = fe.total_charge(k=tuple(k))
        worst = max(worst, np.abs(tc["Q"] - fe.CLIFFORD.charge()).max(), tc["cross"])
    return exact and worst <= 4 * EPS, f"exact at rest {exact}, max deviation at 20 random k {worst:.1e}"


def gauge_proposition():
    kg = ks.lattice_grid(0.5, 1.5)
    kph = np.array([[0.5, 0.0, 0.0], [0.0, 0.5, 0.5], [0.5, -0.5, 0.0]])
    model = it.InteractionModel(ks.QuadratureGrid(kph, np.full(3, 0.3)), kg)
    rng = np.random.default_rng(4)
    shape = (3, len(kg), model.dim)

    def state():
        v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        return it.ProductState(model.kph_grid, kg, v / np.linalg.norm(v, axis=-1, keepdims=True))

    defects = []
    for _ in range(10):
        c = rng.normal(size=4)
        lam = it.transverse_gauge(lambda a, p, c=c: c[0] + c[1] * a + c[2] * np.sin(c[3] * p) + p**3)
        defects.append(it.gauge_defect(model, lam, state()))
    counter = it.gauge_defect(model, it.longitudinal_gauge(1.0), state())
    ok = max(defects) < 1e-10 and counter > 1e-2
    return ok, f"10 admissible max defect {max(defects):.1e}, longitudinal counterexample {counter:.2e}"


def energy_correspondence():
    sp, tsp = bo.OscillatorSpace(32), ph.TwoModeOscSpace(8, 8)
    s_args = (0.8, (0.5, -0.2, 0.1), 0.4)
    h_args, v_args = (0.5, (0.0, 0.3, -0.2), 0.4), (0.3, (0.2, 0.0, 0.1), 0.35)

    def rule(A, c, s):
        return lambda k: A * np.exp(-np.sum((k - np.asarray(c)) ** 2, axis=-1) / (2 * s**2))

    exact_s = bo.gaussian_energy(*s_args)
    exact_p = bo.gaussian_energy(*h_args) + bo.gaussian_energy(*v_args)
    errs_s, errs_p = [], []
    for nr in (8, 16, 32):
        g = ks.make_grid(np.linalg.norm(s_args[1]) + 7 * s_args[2], nr, 32, 32)
        fld = bo.coherent_field(bo.gaussian_profile(*s_args), g, sp)
        errs_s.append(abs(ks.expectation(bo.free_hamiltonian(sp), fld).real / exact_s - 1))
        g = ks.make_grid(0.36 + 7 * 0.4, nr, 32, 32)
        fld = ph.coherent_photon_field(rule(*h_args), rule(*v_args), g, tsp)
        errs_p.append(abs(ph.photon_energy(fld, tsp) / exact_p - 1))
    conv = all(b < a for errs in (errs_s, errs_p) for a, b in zip(errs, errs[1:]))
    ok = errs_s[-1] < 1e-6 and errs_p[-1] < 1e-6 and conv
    return ok, (f"32-point radial: scalar rel {errs_s[-1]:.1e}, photon rel {errs_p[-1]:.1e}; "
                f"errors at 8/16/32 decreasing {conv}")


def emergent_coulomb():
    t0 = time.perf_counter()
    hs, errs = [], []
    for n in (32, 48, 64):
        g = co.SpatialGrid.from_extent(n, 10.0)
        base = co.ClassicalFieldSet.sourceless(g)
        f = co.ClassicalFieldSet(g, base.E, base.B, co.gaussian_density(g), base.j)
        corrected = co.add_coulomb(f)
        errs.append(co.verify_maxwell(f, corrected).gauss)
        hs.append(g.h)
    order = co.convergence_order(hs, errs)
    rng = np.random.default_rng(5)
    j0 = sum(co.gaussian_density(g, rng.normal(), rng.uniform(0.5, 1.5), tuple(rng.uniform(-2, 2, 3)))
             for _ in range(4))
    f = co.ClassicalFieldSet(g, rng.normal(size=(64, 64, 64, 3)), base.B, j0, base.j)
    trip = np.abs(co.remove_coulomb(co.add_coulomb(f)).E - f.E).max()
    elapsed = time.perf_counter() - t0
    ok = errs[-1] < 0.02 and abs(order - 2) < 0.2 and trip < 1e-10 and elapsed < 120
    return ok, f"64^3 Gauss {errs[-1]:.2%}, order {order:.2f}, round trip {trip:.1e}, {elapsed:.1f} s"


def continuity():
    grid = ks.make_grid(2.0, 6, 6, 6)
    profiles = [
        fe.electron_field(fe.FermionProfile(lambda k: 0.8 * np.exp(-np.sum((k - [0.3, 0, 0.2]) ** 2, axis=1) / 0.5),
                                            xi=lambda k: k[:, 0]), grid, (1,)),
        fe.electron_field(fe.FermionProfile(lambda k: 0.4 * np.exp(-np.sum(k**2, axis=1)),
                                            chi=lambda k: 0.5 * k[:, 2]), grid, (2, 3)),
    ]
    x = np.array([0.3, 0.2, -0.1, 0.4])
    steps = np.array([0.1, 0.05, 0.025])
    orders = []
    for fld in profiles:
        res = [fe.continuity_residual(fld, x, h) for h in steps]
        orders.append(np.polyfit(np.log(steps), np.log(res), 1)[0])
    ok = all(abs(o - 2) < 0.1 for o in orders)
    return ok, "orders " + ", ".join(f"{o:.3f}" for o in orders)


CRITERIA = [
    ("interaction-energy identity", energy_identity),
    ("long-wavelength divergence", long_wavelength),
    ("spinor suite", spinor_suite),
    ("algebra suite", algebra_suite),
    ("transversality and free Gauss law", transversality_gauss),
    ("total charge", total_charge),
    ("gauge proposition", gauge_proposition),
    ("energy correspondences", energy_correspondence),
    ("emergent Coulomb", emergent_coulomb),
    ("continuity", continuity),
]


@pytest.mark.parametrize("label, body", CRITERIA, ids=[c[0].replace(" ", "-") for c in CRITERIA])
def test_criterion(capsys, label, body):
    ok, detail = body()
    assert report(capsys, label, ok, detail), detail


if __name__ == "__main__":
    results = [report(None, label, *body()) for label, body in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
