"""End-to-end acceptance gate: one test per headline claim of the package.

Each test prints a single summary line with the measured numbers so that
``pytest -v -s tests/test_acceptance.py`` doubles as a run report. The
production-scale minimizations (L = 200, N = 1024) are expensive and are
shared across tests through module-scoped fixtures; expect the whole
module to take on the order of twenty minutes on one core.
"""

import time

import numpy as np
import pytest
from scipy import optimize

from chdroplet import analytic, diagnostics, expansion, profile1d
from chdroplet.analytic import ProblemSpec
from chdroplet.energy import first_variation, free_energy, g_functional
from chdroplet.field import Field, Grid, translate, uniform_field
from chdroplet.minimizer import FlowConfig, minimize, project_zero_mean

S = analytic.SURFACE_TENSION
K2 = analytic.K_star(2)


def _timed_minimize(L, N, K, seed_etas=None):
    spec = ProblemSpec.from_K(2, L, K)
    grid = Grid(2, N, L)
    cfg = FlowConfig(seed_etas=seed_etas) if seed_etas else FlowConfig()
    t0 = time.perf_counter()
    report = minimize(spec, grid, cfg)
    return spec, grid, report, time.perf_counter() - t0


@pytest.fixture(scope="module")
def run_sub_200():
    return _timed_minimize(200.0, 1024, 0.5 * K2)


@pytest.fixture(scope="module")
def run_super_200():
    return _timed_minimize(200.0, 1024, 2.0 * K2)


@pytest.fixture(scope="module")
def run_super_100():
    return _timed_minimize(100.0, 512, 2.0 * K2)


@pytest.fixture(scope="module")
def sweep_points(run_sub_200, run_super_200):
    """11-point K-sweep over [0.5, 2] K_star at L = 200, N = 1024.

    The endpoints reuse the full-seed runs; interior points descend from
    the uniform seed plus a single droplet seed, which is enough to find
    both candidate basins and keeps the sweep inside its time budget.
    """
    K_values = np.linspace(0.5 * K2, 2.0 * K2, 11)
    t0 = time.perf_counter()
    rows = []
    for i, K in enumerate(K_values):
        if i == 0:
            spec, _, report, _ = run_sub_200
        elif i == len(K_values) - 1:
            spec, _, report, _ = run_super_200
        else:
            spec, _, report, _ = _timed_minimize(
                200.0, 1024, float(K), seed_etas=(analytic.eta_star(2),))
        diag = diagnostics.classify(report.best_field, spec)
        rows.append((float(K), diag.is_droplet))
    return rows, time.perf_counter() - t0


def test_criterion_01_surface_tension_three_ways():
    t0 = time.perf_counter()
    routes = (profile1d.surface_tension_quadrature(),
              profile1d.surface_tension_gradient_route(),
              profile1d.surface_tension_potential_route())
    exact = 2.0 ** 1.5 / 3.0
    worst = max(abs(r - exact) for r in routes)
    spread = max(routes) - min(routes)
    elapsed = time.perf_counter() - t0
    assert worst < 1e-8 and spread < 1e-8
    assert elapsed < 1.0
    print(f"criterion 1 PASS: surface tension routes within {worst:.2e} of "
          f"2^(3/2)/3, spread {spread:.2e}, {elapsed:.2f}s")


def test_criterion_02_critical_constants():
    t0 = time.perf_counter()
    c_gap = abs(analytic.C_star(2) - 0.9185586535)
    eta_gap = abs(analytic.eta_star(2) - 8.0 / 27.0)
    root = optimize.brentq(
        lambda K: analytic.D_of_K(K, 2) - analytic.C_star(2), 0.1, 10.0,
        xtol=1e-14, rtol=8.9e-16)
    k_gap = abs(analytic.K_star(2) - root)
    m_gap = abs(profile1d.constant_M() - np.pi ** 2 / 6.0)
    b_gap = abs(profile1d.constant_B() - 2.0)
    elapsed = time.perf_counter() - t0
    assert c_gap < 1e-9
    assert eta_gap < 1e-12
    assert k_gap < 1e-10
    assert m_gap < 1e-8
    assert b_gap < 1e-8
    assert elapsed < 1.0
    print(f"criterion 2 PASS: C*={analytic.C_star(2):.10f} (gap {c_gap:.1e}), "
          f"eta*=8/27 (gap {eta_gap:.1e}), K* vs root {k_gap:.1e}, "
          f"M vs pi^2/6 {m_gap:.1e}, B vs 2 {b_gap:.1e}, {elapsed:.2f}s")


def test_criterion_03_phenomenological_vs_brute_force():
    t0 = time.perf_counter()
    M = 10_000_000
    eta = np.linspace(0.0, 1.0, M)
    bulk = (1.0 - eta) ** 2
    buf = np.empty(M)
    worst_eta = worst_phi = 0.0
    for d in (2, 3):
        surface = eta ** (1.0 - 1.0 / d)
        cs = analytic.C_star(d)
        rng = np.random.default_rng(d)
        Cs = np.concatenate([rng.uniform(0.2 * cs, 0.999 * cs, 100),
                             rng.uniform(1.001 * cs, 3.0 * cs, 100)])
        for C in Cs:
            np.multiply(bulk, C, out=buf)
            buf += surface
            i = int(np.argmin(buf))
            res = analytic.minimize_phi(float(C), d)
            worst_eta = max(worst_eta, abs(res.eta_c - eta[i]))
            worst_phi = max(worst_phi, abs(res.Phi_min - buf[i]) / buf[i])
            assert (res.regime is analytic.Regime.DROPLET) == (C > cs)
    elapsed = time.perf_counter() - t0
    assert worst_eta < 1e-6
    assert worst_phi < 1e-10
    assert elapsed < 30.0
    print(f"criterion 3 PASS: 400 cases vs 1e7-point scans, eta gap "
          f"{worst_eta:.1e}, Phi rel gap {worst_phi:.1e}, {elapsed:.1f}s")


def test_criterion_04_exact_grid_identities():
    t0 = time.perf_counter()
    grid = Grid(2, 256, 50.0)
    rng = np.random.default_rng(4)

    worst_g = 0.0
    for n in (-0.9, -0.5, 0.0, 0.4, 0.8):
        base = free_energy(uniform_field(grid, n)).total
        for _ in range(50):
            w = project_zero_mean(
                Field(grid, rng.normal(0.0, 0.1, grid.shape)))
            direct = free_energy(Field(grid, n + w.values)).total - base
            viaG = g_functional(w, n)
            scale = max(abs(direct), abs(viaG), 1e-12)
            worst_g = max(worst_g, abs(direct - viaG) / scale)
    assert worst_g < 1e-10

    fld = Field(grid, -0.5 + 0.3 * rng.standard_normal(grid.shape))
    grad = first_variation(fld).values
    eps, worst_dir = 1e-6, 0.0
    for _ in range(20):
        v = rng.standard_normal(grid.shape)
        plus = free_energy(Field(grid, fld.values + eps * v)).total
        minus = free_energy(Field(grid, fld.values - eps * v)).total
        fd = (plus - minus) / (2.0 * eps)
        exact = float(np.sum(grad * v)) * grid.cell_volume
        worst_dir = max(worst_dir, abs(fd - exact) / max(abs(exact), 1e-12))
    assert worst_dir < 1e-6

    e0 = free_energy(fld).total
    worst_shift = max(
        abs(free_energy(translate(fld, s)).total - e0) / abs(e0)
        for s in [(17, 3), (0, 200), (255, 255)])
    assert worst_shift < 1e-12

    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"criterion 4 PASS: shifted-functional identity {worst_g:.1e}, "
          f"gradient check {worst_dir:.1e}, translation {worst_shift:.1e}, "
          f"{elapsed:.1f}s")


def test_criterion_05_double_stripe_energy():
    t0 = time.perf_counter()
    grid = Grid(2, 512, 40.0)
    x = grid.axis_coordinates()
    # +1 slab of width L/2: two planar interfaces, each of length L
    stripe = profile1d.planar_profile(np.abs(x) - grid.L / 4.0)
    fld = Field(grid, np.tile(stripe[:, None], (1, grid.N)))
    e = free_energy(fld).total
    target = 2.0 * S * grid.L
    rel = abs(e - target) / target
    elapsed = time.perf_counter() - t0
    assert rel < 0.01
    assert elapsed < 10.0
    print(f"criterion 5 PASS: double stripe energy {e:.6f} vs 2SL="
          f"{target:.6f} (rel {rel:.2e}), {elapsed:.2f}s")


def test_criterion_06_subcritical_uniform_wins(run_sub_200):
    spec, grid, report, elapsed = run_sub_200
    sup = float(np.abs(report.best_field.values - spec.n).max())
    uniform_e = min(o.energy for o in report.per_seed_energies
                    if o.name == "uniform")
    droplet_ok = all(o.energy >= uniform_e - 1e-12 * abs(uniform_e)
                     for o in report.per_seed_energies)
    assert report.best_seed == "uniform"
    assert sup < 1e-3
    assert droplet_ok
    assert elapsed < 600.0
    print(f"criterion 6 PASS: K=0.5K*, best seed uniform, sup distance "
          f"{sup:.1e}, all {len(report.per_seed_energies)} seeds >= uniform "
          f"energy, {elapsed:.0f}s")


def test_criterion_07_supercritical_energy_density(run_super_200,
                                                   run_super_100):
    gaps = {}
    for spec, grid, report, elapsed in (run_super_100, run_super_200):
        geo = analytic.geometry(spec)
        res = analytic.minimize_phi(analytic.C_of_n(spec), 2)
        numeric = report.energy.total / geo.Gamma0
        target = S * res.Phi_min
        gaps[spec.L] = abs(numeric - target) / target
    total_time = run_super_100[3] + run_super_200[3]
    assert gaps[200.0] < 0.15
    assert gaps[200.0] < gaps[100.0]
    assert total_time < 1800.0
    print(f"criterion 7 PASS: K=2K*, f_L/|Gamma0| rel gap "
          f"{gaps[200.0]:.2e} at L=200 < {gaps[100.0]:.2e} at L=100, "
          f"{total_time:.0f}s")


def test_criterion_08_droplet_shape(run_super_200, run_super_100):
    measured = {}
    for spec, grid, report, _ in (run_super_100, run_super_200):
        res = analytic.minimize_phi(analytic.C_of_n(spec), 2)
        kappa = spec.delta ** (1.0 / 3.0)
        part = diagnostics.partition_volumes(report.best_field, spec,
                                             kappa=kappa)
        l4 = diagnostics.l4_distance_to_sharp(report.best_field, spec,
                                              eta=res.eta_c)
        bound = 4.0 * spec.delta ** 2 / kappa ** 2 * spec.L ** 2
        measured[spec.L] = (part.eta_hat, res.eta_c, l4,
                            part.vol_interface, bound)
    eta_hat, eta_c, l4_200, vol_a, bound = measured[200.0]
    assert abs(eta_hat - eta_c) / eta_c < 0.15
    assert l4_200 < 0.5
    assert l4_200 < measured[100.0][2]
    for L in (100.0, 200.0):
        assert measured[L][3] <= measured[L][4]
    print(f"criterion 8 PASS: eta measured {eta_hat:.4f} vs eta_c "
          f"{eta_c:.4f}, L4 distance {l4_200:.3f} < 0.5 and < "
          f"{measured[100.0][2]:.3f} at L=100, |A|={vol_a:.0f} <= "
          f"{bound:.0f}")


def test_criterion_09_transition_bracketing(sweep_points):
    rows, elapsed = sweep_points
    labels = [droplet for _, droplet in rows]
    flips = [i for i in range(len(rows) - 1)
             if labels[i] != labels[i + 1]]
    assert len(flips) == 1
    i = flips[0]
    assert not labels[0] and labels[-1]
    assert rows[i][0] <= K2 <= rows[i + 1][0]
    assert elapsed < 7200.0
    print(f"criterion 9 PASS: single flip between K={rows[i][0]:.4f} and "
          f"K={rows[i + 1][0]:.4f}, bracketing K*={K2:.4f}, {elapsed:.0f}s")


def test_criterion_10_expansion_consistency(run_super_200, run_super_100):
    t0 = time.perf_counter()
    spec200 = run_super_200[0]
    state = expansion.expansion_state(spec200)
    residual = abs(2.0 * np.pi * state.r1 ** 3 - 2.0 * np.pi * state.r1
                   + state.lam * state.omega_lambda_area
                   * analytic.COMPRESSIBILITY * S / 2.0)
    assert residual < 1e-10

    res = analytic.minimize_phi(analytic.C_of_n(spec200), 2)
    r1_gap = abs(state.r1 - np.sqrt(res.eta_c))
    assert r1_gap < 1e-6

    # pick L so that the equimolar radius hits 20, 40, 80 at K = 2K*
    K = 2.0 * K2
    r0s = np.array([20.0, 40.0, 80.0])
    Ls = (r0s / np.sqrt(K / (2.0 * np.pi))) ** 1.5
    resids = [expansion.radial_el_residual(ProblemSpec.from_K(2, L, K))
              for L in Ls]
    exponent = float(np.polyfit(np.log(1.0 / r0s), np.log(resids), 1)[0])
    assert 1.5 < exponent < 2.5

    for spec, grid, report, _ in (run_super_100, run_super_200):
        built, _ = expansion.first_order_solution(spec, grid)
        assert free_energy(built).total >= report.energy.total
    elapsed = time.perf_counter() - t0
    assert elapsed < 1200.0
    print(f"criterion 10 PASS: cubic residual {residual:.1e}, r1 vs "
          f"sqrt(eta_c) {r1_gap:.1e}, residual decay exponent "
          f"{exponent:.2f}, construction energy >= minimizer, "
          f"{elapsed:.0f}s")
