"""Acceptance suite: one test (or parametrized group) per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
result lines.  The error tables compare domain-averaged L1 errors, which is
the normalization of the published tables; magnitude agreement is asserted
within a factor of five wherever the tabulated value sits meaningfully above
the double-precision floor (1e-13), and tiny tabulated entries are asserted
as an upper bound instead.
"""

import numpy as np
import pytest

from sldc.cli import RunConfig, advance_to, derive_dtau, reference_solution
from sldc.diagnostics import l1_error_mean, observed_order
from sldc.idc import idc_ode_solve
from sldc.idc_split import IdcPdeConfig, make_stepper
from sldc.poisson import poisson_1d, poisson_2d
from sldc.scenarios import get_scenario, initial_field
from sldc.stability import extract_stencil, make_idc_advection_step, stability_table

VP_CFLS = (0.6, 0.5, 0.4, 0.3, 0.2)
GC_CFLS = (0.67, 0.62, 0.57, 0.52, 0.47)

# published error tables (domain-averaged L1), strong Landau damping T = 0.1
TABLE_LANDAU = {
    0: (3.85e-06, 3.23e-06, 2.60e-06, 1.94e-06, 1.30e-06),
    1: (9.71e-09, 6.79e-09, 4.37e-09, 2.44e-09, 1.09e-09),
    2: (2.22e-11, 1.30e-11, 6.67e-12, 2.79e-12, 8.34e-13),
    3: (1.83e-13, 8.90e-14, 3.66e-14, 1.15e-14, 2.31e-15),
}
TABLE_TWO_STREAM_1 = {
    0: (4.46e-07, 3.73e-07, 2.99e-07, 2.24e-07, 1.50e-07),
    1: (2.36e-09, 1.66e-09, 1.06e-09, 5.94e-10, 2.65e-10),
    2: (9.23e-12, 5.43e-12, 2.78e-12, 1.17e-12, 3.48e-13),
    3: (1.25e-13, 6.16e-14, 2.52e-14, 7.93e-15, 1.60e-15),
}
TABLE_TWO_STREAM_2 = {
    0: (6.72e-07, 5.56e-07, 4.46e-07, 3.36e-07, 2.24e-07),
    1: (2.33e-09, 1.61e-09, 1.03e-09, 5.84e-10, 2.60e-10),
    2: (3.61e-12, 2.08e-12, 1.07e-12, 4.53e-13, 1.34e-13),
    3: (1.79e-14, 8.60e-15, 3.53e-15, 1.13e-15, 2.65e-16),
}

CFL_BOUNDS = {  # scheme -> (third-order bound, fifth-order bound)
    "IDC2J0": (np.inf, np.inf),
    "IDC2J1": (1.50, 1.55),
    "IDC3J0": (np.inf, np.inf),
    "IDC3J1": (0.73, 0.71),
    "IDC3J2": (0.67, 0.66),
}

FLOOR = 1e-13  # tabulated entries below this sit at the publication's round-off


def _vp_template(scenario):
    return RunConfig(scenario=scenario, n1=400, n2=400, tfinal=0.1,
                     recon="linear5")


def _solve(template: RunConfig, cfl, K, split="lie"):
    config = template.resolve()
    scen = get_scenario(config.scenario)
    f = initial_field(scen, config.n1, config.n2)
    cfg = IdcPdeConfig(M=2, K=K, split=split, model=scen.model,
                       recon=config.recon, velocity_sign=scen.velocity_sign)
    stepper = make_stepper(f.grid, cfg)
    dtau = derive_dtau(f, scen.model, cfl, scen.velocity_sign)
    return advance_to(stepper, f, config.tfinal, cfg.M * dtau)


@pytest.fixture(scope="session")
def landau_reference():
    return reference_solution(_vp_template("landau_strong"), mode="computed")


def _error_table(template, reference, K, split="lie", cfls=VP_CFLS):
    errs = [l1_error_mean(_solve(template, c, K, split), reference) for c in cfls]
    return errs, observed_order(errs, cfls)


def _check_orders(orders, target, tol, pair_tol=0.6):
    mean = float(np.mean(orders))
    assert abs(mean - target) < tol, (orders, target)
    assert all(abs(o - target) < pair_tol for o in orders), (orders, target)
    return mean


def _check_magnitudes(errs, table_row):
    for err, ref in zip(errs, table_row):
        if ref >= FLOOR:
            assert ref / 5 < err < ref * 5, (err, ref)
        else:
            assert err < FLOOR, (err, ref)


def _vp_table_criterion(label, scenario, table, reference):
    template = _vp_template(scenario)
    for K in range(4):
        errs, orders = _error_table(template, reference, K)
        mean = _check_orders(orders, K + 1, 0.25)
        _check_magnitudes(errs, table[K])
        print(f"ACCEPTANCE {label} IDC3J{K}: mean order {mean:.2f} "
              f"(target {K + 1}), errors {['%.2e' % e for e in errs]} -> PASS")


def test_criterion_1_landau_temporal_order_lifting(landau_reference):
    _vp_table_criterion("1 (Landau, Lie)", "landau_strong", TABLE_LANDAU,
                        landau_reference)


def test_criterion_2_strang_coupling(landau_reference):
    template = _vp_template("landau_strong")
    for K, target in ((0, 2.0), (1, 4.0)):
        errs, orders = _error_table(template, landau_reference, K, split="strang")
        mean = _check_orders(orders, target, 0.25, pair_tol=0.9)
        print(f"ACCEPTANCE 2 (Strang) IDC-Strang3J{K}: mean order {mean:.2f} "
              f"(target {target:g}), errors {['%.2e' % e for e in errs]} -> PASS")


@pytest.mark.parametrize("scenario,table", [
    ("two_stream_1", TABLE_TWO_STREAM_1),
    ("two_stream_2", TABLE_TWO_STREAM_2),
])
def test_criterion_3_two_stream_tables(scenario, table):
    reference = reference_solution(_vp_template(scenario), mode="computed")
    _vp_table_criterion(f"3 ({scenario})", scenario, table, reference)


@pytest.mark.parametrize("tag", ["landau_strong", "two_stream_1", "two_stream_2",
                                 "kelvin_helmholtz", "euler_accuracy",
                                 "shear_flow", "vortex_patch"])
@pytest.mark.parametrize("M,K,split", [(2, 2, "lie"), (1, 1, "strang")])
def test_criterion_4_mass_conservation(tag, M, K, split):
    scen = get_scenario(tag)
    f = initial_field(scen, 48, 48)
    cfg = IdcPdeConfig(M=M, K=K, split=split, model=scen.model, recon="weno5",
                       velocity_sign=scen.velocity_sign)
    stepper = make_stepper(f.grid, cfg)
    # CFL 0.4 keeps the traced characteristics of the sharpening drift flows
    # from crossing over the 100-interval horizon
    dtau = derive_dtau(f, scen.model, 0.4, scen.velocity_sign)
    vol = f.grid.cell_volume
    mass0 = f.values.sum() * vol
    scale = max(abs(mass0), np.sum(np.abs(f.values)) * vol)
    worst = 0.0
    cur = f
    for _ in range(100):
        cur = stepper.interval(cur, M * dtau)
        worst = max(worst, abs(cur.values.sum() * vol - mass0) / scale)
    assert worst < 1e-12, worst
    print(f"ACCEPTANCE 4 ({tag}, {cfg.name}): mass deviation {worst:.2e} "
          f"over 100 intervals -> PASS")


@pytest.fixture(scope="module")
def cfl_table():
    return stability_table()


@pytest.mark.parametrize("scheme", list(CFL_BOUNDS))
@pytest.mark.parametrize("recon,col", [("linear3", 0), ("linear5", 1)])
def test_criterion_5_stability_bounds(cfl_table, scheme, recon, col):
    got = cfl_table[recon][scheme]
    want = CFL_BOUNDS[scheme][col]
    label = {"linear3": "SL3", "linear5": "SL5"}[recon]
    if np.isinf(want):
        assert np.isinf(got), (
            f"{label}+{scheme}: expected no restriction up to lambda 10, got {got}")
        print(f"ACCEPTANCE 5 ({label}+{scheme}): no restriction -> PASS")
    else:
        assert abs(got - want) <= 0.03, (
            f"{label}+{scheme}: computed bound {got:.3f} vs published {want:.2f}; "
            f"see the decisions ledger for the SL5+IDC2J1 analysis")
        print(f"ACCEPTANCE 5 ({label}+{scheme}): bound {got:.3f} "
              f"(published {want:.2f}) -> PASS")


def _idc2j0_row(lam):
    s = int(np.floor(lam))
    t = lam - s
    cells = {
        -2: t * (t**2 - 1) / 6,
        -1: t * (-(t**2) + t + 2) / 2,
        0: (t**3 - 2 * t**2 - t + 2) / 2,
        1: -t * (t**2 - 3 * t + 2) / 6,
    }
    return {k - s: v for k, v in cells.items()}


def _idc2j1_row(lam):
    L = lam
    if 0 < L < 1:
        return {
            -4: -(1 / 72) * L**2 * (L**2 - 1),
            -3: (1 / 24) * L**2 * (3 * L**2 - L - 4),
            -2: (1 / 12) * L * (-4 * L**3 + 4 * L**2 + 7 * L - 2),
            -1: (1 / 36) * L * (13 * L**3 - 24 * L**2 - 16 * L + 36),
            0: -(1 / 24) * (3 * L**4 - 10 * L**3 + 5 * L**2 + 12 * L - 24),
            1: (1 / 24) * L * (-L**3 + L**2 + 4 * L - 8),
            2: (1 / 36) * L**2 * (L**2 - 3 * L + 2),
        }
    return {
        -5: -(1 / 72) * L**2 * (L**2 - 3 * L + 2),
        -4: (1 / 24) * L**2 * (3 * L**2 - 10 * L + 7),
        -3: -(1 / 12) * L**2 * (4 * L**2 - 16 * L + 13),
        -2: (1 / 36) * L * (13 * L**3 - 63 * L**2 + 71 * L - 6),
        -1: (1 / 24) * L * (-3 * L**3 + 19 * L**2 - 34 * L + 24),
        0: -(1 / 24) * (L**4 - 4 * L**3 + L**2 + 12 * L - 24),
        1: (1 / 36) * L * (L**3 - 6 * L**2 + 11 * L - 12),
    }


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.9, 1.2, 1.8])
def test_criterion_6_printed_stencil_regression(lam):
    for K, row_fn in ((0, _idc2j0_row), (1, _idc2j1_row)):
        sten = extract_stencil(make_idc_advection_step("linear3", 1, K), lam)
        got = dict(zip(sten.offsets.tolist(), sten.coeffs.tolist()))
        want = row_fn(lam)
        for k, v in want.items():
            assert abs(got.pop(k, 0.0) - v) < 1e-12, (K, lam, k)
        assert all(abs(v) < 1e-12 for v in got.values()), (K, lam)
    print(f"ACCEPTANCE 6 (lambda={lam}): composed stencils match the printed "
          f"polynomials to 1e-12 -> PASS")


def test_criterion_7_ode_order_lifting_oracle():
    for K in range(4):
        errs = []
        for nint in (8, 16, 32):
            _, y = idc_ode_solve(lambda t, y: y, 1.0, 1.0, nint, 3, K)
            errs.append(abs(float(y[-1]) - np.e))
        orders = np.log2(np.array(errs[:-1]) / errs[1:])
        assert np.all(np.abs(orders - (K + 1)) < 0.2), (K, orders)
        print(f"ACCEPTANCE 7 (ODE, K={K}): orders {np.round(orders, 3)} "
              f"(target {K + 1}) -> PASS")


def test_criterion_8_euler_accuracy():
    template = RunConfig(scenario="euler_accuracy", n1=300, n2=300, tfinal=1.0,
                         recon="linear3")
    exact = initial_field(get_scenario("euler_accuracy"), 300, 300)
    for K, target in ((0, 1.0), (1, 2.0), (2, 3.0)):
        errs = [l1_error_mean(_solve(template, c, K), exact) for c in GC_CFLS]
        orders = observed_order(errs, GC_CFLS)
        if K == 2:
            # spatial error begins to dominate at the small-CFL end; the
            # saturated tail is excluded from the order average
            core = orders[:-1]
        else:
            core = orders
        mean = float(np.mean(core))
        assert abs(mean - target) < 0.3, (K, orders, errs)
        print(f"ACCEPTANCE 8 (Euler) IDC3J{K}: orders {np.round(orders, 2)} "
              f"mean {mean:.2f} (target {target:g}), "
              f"errors {['%.2e' % e for e in errs]} -> PASS")


def test_criterion_9_field_solver_oracles():
    k, alpha = 0.5, 0.3
    L = 2 * np.pi / k
    n = 128
    x = np.arange(n) * L / n
    out = poisson_1d(1.0 + alpha * np.cos(k * x), L)
    exact = (alpha / k) * np.sin(k * x)
    assert np.max(np.abs(out.E - exact)) / np.max(np.abs(exact)) < 1e-10

    m = 96
    xx = (np.arange(m) * 2 * np.pi / m)[:, None]
    yy = (np.arange(m) * 2 * np.pi / m)[None, :]
    fld = poisson_2d(-2.0 * np.sin(xx) * np.sin(yy), (2 * np.pi, 2 * np.pi))
    u1, u2 = fld.perp(-1.0)
    assert np.max(np.abs(fld.phi - np.sin(xx) * np.sin(yy))) < 1e-10
    assert np.max(np.abs(u1 + np.sin(xx) * np.cos(yy))) < 1e-10
    assert np.max(np.abs(u2 - np.cos(xx) * np.sin(yy))) < 1e-10
    print("ACCEPTANCE 9 (field solvers): analytic cases to 1e-10 -> PASS")


def _enstrophy_dev(tag, K, T, n=128, cfl=0.67):
    scen = get_scenario(tag)
    f = initial_field(scen, n, n)
    cfg = IdcPdeConfig(M=2, K=K, model=scen.model, recon="weno5",
                       velocity_sign=scen.velocity_sign)
    stepper = make_stepper(f.grid, cfg)
    dtau = derive_dtau(f, scen.model, cfl, scen.velocity_sign)
    ens0 = np.sqrt(np.sum(f.values**2) * f.grid.cell_volume)
    out = advance_to(stepper, f, T, cfg.M * dtau)
    assert np.all(np.isfinite(out.values))
    ens = np.sqrt(np.sum(out.values**2) * out.grid.cell_volume)
    return abs(ens - ens0) / ens0


def test_criterion_10_qualitative_long_runs():
    dev0 = _enstrophy_dev("kelvin_helmholtz", 0, 40.0)
    dev2 = _enstrophy_dev("kelvin_helmholtz", 2, 40.0)
    assert dev2 < dev0, (dev2, dev0)
    shear = _enstrophy_dev("shear_flow", 2, 8.0)
    assert np.isfinite(shear)
    print(f"ACCEPTANCE 10 (long runs): KH enstrophy deviation J2 {dev2:.3e} "
          f"< J0 {dev0:.3e}; shear flow completed (dev {shear:.3e}) -> PASS")
