import numpy as np
import pytest

from chdroplet import analytic, expansion
from chdroplet.analytic import ProblemSpec
from chdroplet.energy import first_variation, free_energy
from chdroplet.field import Grid
from chdroplet.minimizer import FlowConfig, minimize
from chdroplet.potential import COMPRESSIBILITY, SURFACE_TENSION

K2 = 2.0 * analytic.K_star(2)

# d=2, chi=1/2, S=2 sqrt(2)/3, r1=1: r2 = -chi S / 8 = -sqrt(2)/24
# (40-digit arithmetic, frozen)
R2_UNIT_ORACLE = -0.05892556509887896036673703017540408660707


def _supercritical(L=200.0, K=K2):
    return ProblemSpec.from_K(d=2, L=L, K=K)


def test_solve_r1_equimolar_limit():
    roots, selected = expansion.solve_r1(1e-10, 1.0)
    assert selected == pytest.approx(1.0, abs=1e-9)
    assert min(roots) == pytest.approx(0.0, abs=1e-9)


def test_solve_r1_residual_in_the_cubic():
    spec = _supercritical()
    state = expansion.expansion_state(spec)
    r = state.r1
    residual = 2 * np.pi * r ** 3 - 2 * np.pi * r \
        + state.lam * state.omega_lambda_area * COMPRESSIBILITY \
        * SURFACE_TENSION / 2.0
    assert abs(residual) < 1e-10


def test_solve_r1_subcritical_returns_no_droplet():
    # push the coefficient past the fold: no positive root remains
    roots, selected = expansion.solve_r1(1.0, 100.0)
    assert roots == []
    assert isinstance(selected, expansion.NoDroplet)


def test_fold_location_matches_the_cubic_discriminant():
    """The positive roots disappear when the constant term of
    2 pi (r^3 - r) + b exceeds the local maximum of 2 pi (r - r^3),
    i.e. b_fold = 2 pi * 2/(3 sqrt 3) = 4 pi /(3 sqrt 3). This is the
    spinodal of the droplet branch, not the thermodynamic transition:
    the droplet exists as a local minimum on [b_fold-, b_transition]
    but only wins the energy comparison above C_star."""
    b_fold = 4.0 * np.pi / (3.0 * np.sqrt(3.0))
    lo, hi = 0.9 * b_fold, 1.1 * b_fold
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        _, sel = expansion.solve_r1(1.0, 2.0 * mid / (COMPRESSIBILITY
                                                      * SURFACE_TENSION))
        if isinstance(sel, expansion.NoDroplet):
            hi = mid
        else:
            lo = mid
    assert 0.5 * (lo + hi) == pytest.approx(b_fold, rel=1e-6)


def test_fold_in_c_units_is_below_the_transition():
    """Translating the fold into the C coordinate (C = pi/(2b) for the
    cubic's constant term b in d=2) gives 3 sqrt(3)/8 = 0.6495..., which
    is strictly below C_star = 0.9185... So losing the positive root is
    a stronger condition than losing the energy comparison, and the two
    do NOT coincide: NoDroplet implies the Uniform regime, but the
    Uniform regime persists well above the fold, where the droplet
    still exists as a metastable local minimum."""
    b_fold = 4.0 * np.pi / (3.0 * np.sqrt(3.0))
    C_fold = np.pi / (2.0 * b_fold)
    assert C_fold == pytest.approx(3.0 * np.sqrt(3.0) / 8.0, rel=1e-14)
    assert C_fold < analytic.C_star(2) - 0.25
    # one-directional consistency on a C grid between fold and transition
    for C in np.linspace(C_fold + 1e-3, analytic.C_star(2) - 1e-3, 7):
        b = np.pi / (2.0 * C)
        _, sel = expansion.solve_r1(1.0, 2.0 * b / (COMPRESSIBILITY
                                                    * SURFACE_TENSION))
        assert not isinstance(sel, expansion.NoDroplet)
        assert analytic.minimize_phi(C, 2).regime is analytic.Regime.UNIFORM


def test_selected_root_is_stationary_for_reduced_energy():
    state = expansion.expansion_state(_supercritical())
    assert abs(expansion.stationarity_residual(state)) < 1e-8


def test_r1_matches_sqrt_eta_c():
    spec = _supercritical()
    state = expansion.expansion_state(spec)
    eta_c = analytic.minimize_phi(analytic.C_of_n(spec), 2).eta_c
    assert state.r1 == pytest.approx(np.sqrt(eta_c), abs=1e-6)


def test_multiplier_and_shift_relations():
    state = expansion.expansion_state(_supercritical())
    assert state.mu1 == pytest.approx(-state.K1 * SURFACE_TENSION / 2.0,
                                      abs=1e-15)
    assert state.phi1 == pytest.approx(-COMPRESSIBILITY * state.mu1, abs=1e-15)


def test_second_order_radius_shrinks():
    state = expansion.expansion_state(_supercritical())
    assert state.r2 < 0
    assert expansion.second_order_radius(state) < state.r1


def test_r2_unit_case_oracle():
    # the closed form at r1 = 1 reduces to -chi S / 8
    r2 = -COMPRESSIBILITY * SURFACE_TENSION / 8.0
    assert r2 == pytest.approx(R2_UNIT_ORACLE, abs=1e-15)


def test_mass_defect_improves_at_second_order():
    spec = _supercritical()
    assert expansion.mass_defect(spec, 2) < expansion.mass_defect(spec, 1)


def test_first_order_solution_mean_is_exact():
    spec = _supercritical(L=50.0)
    grid = Grid(d=2, N=256, L=50.0)
    fld, state = expansion.first_order_solution(spec, grid)
    assert fld.mean() == pytest.approx(spec.n, abs=1e-13)
    assert state.r1 > 0


def test_construction_energy_dominates_minimizer():
    spec = _supercritical(L=50.0)
    grid = Grid(d=2, N=256, L=50.0)
    fld, _ = expansion.first_order_solution(spec, grid)
    report = minimize(spec, grid, FlowConfig(max_iters=30000))
    assert free_energy(fld).total >= report.energy.total


def test_el_residual_decays_quadratically_in_lambda():
    lams, residuals = [], []
    for L in (60.0, 170.0, 480.0):
        spec = _supercritical(L=L)
        state = expansion.expansion_state(spec)
        lams.append(state.lam)
        residuals.append(expansion.radial_el_residual(spec))
    slope = np.polyfit(np.log(lams), np.log(residuals), 1)[0]
    assert 1.5 <= slope <= 2.5


def test_reduced_energy_approximates_construction_energy():
    spec = _supercritical(L=50.0)
    grid = Grid(d=2, N=512, L=50.0)
    fld, state = expansion.first_order_solution(spec, grid)
    reduced = expansion.reduced_free_energy(state.r1, state.lam, 50.0)
    assert free_energy(fld).total == pytest.approx(reduced, abs=1.5)


def test_expansion_rejects_d3():
    with pytest.raises(ValueError):
        expansion.expansion_state(ProblemSpec(d=3, L=50.0, n=-0.8))


def test_subcritical_instance_has_no_construction():
    spec = ProblemSpec.from_K(d=2, L=200.0, K=0.2 * analytic.K_star(2))
    state = expansion.expansion_state(spec)
    assert isinstance(state, expansion.NoDroplet)
    with pytest.raises(ValueError):
        expansion.first_order_solution(spec, Grid(d=2, N=1024, L=200.0))
