"""Acceptance criteria 1-9, one PASS/FAIL line each (printed in the terminal summary).

Tolerances are pinned here and never relaxed.
"""

import time

import numpy as np
import pytest

from conftest import random_draws, record_criterion
from porolux.brinkman3d import DilatedConfig, convergence_study, scaling_diagnostics
from porolux.config import parse_config
from porolux.core import (ConstantGap, GradientForcing, Grid2D, ParabolicGap, SinusoidalForcing, SinusoidalGap,
                          make_gap_field, make_params, sample_forcing)
from porolux.numerics import (central_second_difference, forward_difference, midpoint_norm,
                              observed_orders, richardson_order, trapezoid)
from porolux.reduced_flow import (assemble_reynolds, column_flux, eval_profile, mobility_coefficient,
                                  profile_coeffs, solve_pressure)
from porolux.reduced_heat import (column_ode_oracle, dissipation_density, make_temperature_profile,
                                  temperature_profile)
from porolux.runner import run

N_DRAWS = 1000
DRAW_SEED = 20240601
FLUX_FD_ORDER = 8  # one-sided stencil; lower orders cannot resolve the M h ~ 700 wall layer at nz = 4096


def _draws():
    out = []
    for params, h, g2, bscale in random_draws(N_DRAWS, seed=DRAW_SEED):
        s0 = make_temperature_profile(params, h, g2).scale
        b = bscale * s0 * params.k / h
        out.append((make_params(params.mu, params.mu_eff, params.K, params.k, b), h, g2))
    return out


DRAWS = _draws()


def test_criterion_1_closed_form_identities():
    worst = dict(wall=0.0, sum=0.0, sym=0.0, top=0.0, flux=0.0)
    for p, h, g2 in DRAWS:
        Kmu = p.K_over_mu
        co = profile_coeffs(p, h)
        z = np.linspace(0.0, h, 257)
        P = eval_profile(co, z)
        worst["wall"] = max(worst["wall"], abs(P[0]) / Kmu, abs(P[-1]) / Kmu)
        worst["sum"] = max(worst["sum"], abs(co.A1 + co.A2 + Kmu) / Kmu)
        worst["sym"] = max(worst["sym"], np.abs(P - P[::-1]).max() / P.max())
        tp = make_temperature_profile(p, h, g2)
        worst["top"] = max(worst["top"], abs(temperature_profile(tp, h)) / tp.scale)
        dz = h / 4096
        dT0 = forward_difference(lambda s: temperature_profile(tp, s), 0.0, dz, FLUX_FD_ORDER)
        worst["flux"] = max(worst["flux"], abs(-p.k * dT0 - p.b) / abs(p.b))
    ok = (worst["wall"] <= 1e-12 and worst["sum"] <= 1e-12 and worst["sym"] <= 1e-12
          and worst["top"] <= 1e-10 and worst["flux"] <= 1e-6)
    detail = ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
    assert record_criterion(1, ok, f"{N_DRAWS} draws, worst: {detail}")


def _romberg_flux(co, n=4096):
    """Trapezoid sums on 1024/2048/4096 subintervals of one 4097-point sample, two Romberg steps."""
    f = eval_profile(co, np.linspace(0.0, co.h, n + 1))
    t = [trapezoid(f[::s], co.h * s / n) for s in (4, 2, 1)]
    r = [(4 * t[1] - t[0]) / 3, (4 * t[2] - t[1]) / 3]
    return (16 * r[1] - r[0]) / 15, t[2]


def test_criterion_2_flux_mobility_consistency():
    w_code = w_quad = w_plain = 0.0
    for p, h, _ in DRAWS:
        c = mobility_coefficient(p, h)
        w_code = max(w_code, abs(column_flux(p, h) - c) / c)
        q, plain = _romberg_flux(profile_coeffs(p, h))
        w_quad = max(w_quad, abs(q - c) / c)
        w_plain = max(w_plain, abs(plain - c) / c)
    ok = w_code <= 1e-12 and w_quad <= 1e-8
    assert record_criterion(2, ok, f"|flux-c|/c={w_code:.2e}, Romberg(4096-pt trapezoid)={w_quad:.2e} "
                                   f"(plain trapezoid {w_plain:.2e})")


def test_criterion_3_poiseuille_limit():
    errs = {}
    for mh, bound in ((1e-2, 2e-5), (1e-3, 2e-7)):
        for p in (make_params(1, 1, 1, 1), make_params(3.0, 0.2, 0.7, 1)):
            h = mh / p.M
            c = mobility_coefficient(p, h)
            errs[(mh, p.mu)] = (abs(c - h ** 3 / (12 * p.mu_eff)) / c, bound)
    ok = all(e <= b for e, b in errs.values())
    detail = ", ".join(f"Mh={k[0]:g} mu={k[1]:g}: {e:.2e} <= {b:g}" for k, (e, b) in errs.items())
    assert record_criterion(3, ok, detail)


def _series_pressure(X, Y, nterms=400):
    p = (2 / np.pi) * (X - 0.5)
    for n in range(2, 2 * nterms + 1, 2):
        a = 4.0 / (np.pi * (n * n - 1))
        s = 0.5 * (np.exp(n * np.pi * (X - 1.0)) - np.exp(-n * np.pi * X)) / (0.5 * (1 + np.exp(-n * np.pi)))
        p -= a * s / (n * np.pi) * np.cos(n * np.pi * Y)
    return p


def test_criterion_4_reynolds_exactness_and_order():
    t0 = time.perf_counter()
    params = make_params(1, 1, 1, 1)
    worst_lin = 0.0
    for (nx, ny), gap_spec in [((4, 4), ConstantGap(1.0)), ((16, 9), ParabolicGap(1.5, 0.3)),
                               ((33, 20), SinusoidalGap(1.0, 0.4, 1, 2)), ((64, 64), ConstantGap(0.5))]:
        g = Grid2D(nx, ny)
        f = sample_forcing(GradientForcing(1.0, 0.0), g)
        p = solve_pressure(assemble_reynolds(g, make_gap_field(gap_spec, g), params, f))
        X, _ = g.centers()
        worst_lin = max(worst_lin, np.abs(p.values - (X - 0.5)).max())
    errs = []
    for n in (16, 32, 64):
        g = Grid2D(n, n)
        f = sample_forcing(SinusoidalForcing(1, 0, 0, 1), g)
        p = solve_pressure(assemble_reynolds(g, make_gap_field(ConstantGap(1.0), g), params, f), tol=1e-12)
        X, Y = g.centers()
        errs.append(midpoint_norm(p.values - _series_pressure(X, Y), g.cell_area))
    orders = observed_orders(errs)
    dt = time.perf_counter() - t0
    ok = worst_lin <= 1e-10 and np.all(orders >= 1.9) and dt < 60
    assert record_criterion(4, ok, f"linear max err={worst_lin:.1e}, L2 errs={[f'{e:.2e}' for e in errs]}, "
                                   f"orders={np.round(orders, 3).tolist()}, {dt:.1f}s")


def test_criterion_5_temperature_oracle():
    p = make_params(1, 1, 1, 1, 0.5)
    tp = make_temperature_profile(p, 1.0, 1.0)
    errs = []
    for nz in (64, 128, 256):
        z, T = column_ode_oracle(p, 1.0, 1.0, nz)
        errs.append(np.abs(T - temperature_profile(tp, z)).max())
    order_oracle = richardson_order(*errs)
    z = np.linspace(0.05, 0.95, 19)
    res = []
    for dz in (1 / 64, 1 / 128, 1 / 256):
        T2 = central_second_difference(lambda s: temperature_profile(tp, s), z, dz)
        res.append(np.abs(-p.k * T2 - dissipation_density(tp, z)).max())
    order_res = richardson_order(*res)
    ok = abs(order_oracle - 2) <= 0.1 and abs(order_res - 2) <= 0.1
    assert record_criterion(5, ok, f"oracle Linf={[f'{e:.2e}' for e in errs]} order={order_oracle:.4f}; "
                                   f"ODE residual order={order_res:.4f}")


# -- dilated 3D criteria share one study ---------------------------------------

STUDY_EPS = (1 / 4, 1 / 8, 1 / 16)


@pytest.fixture(scope="module")
def study():
    base = DilatedConfig(STUDY_EPS[0], make_params(1, 1, 1, 1, 1.0), SinusoidalForcing(1, 0, 0, 1),
                         nx=32, ny=32, nz=16, h=1.0)
    t0 = time.perf_counter()
    rows, sols = convergence_study(base, STUDY_EPS, return_solutions=True)
    return rows, sols, time.perf_counter() - t0


def test_criterion_6_energy_identity(study):
    rows, sols, dt = study
    per = [(e, s.energy["rel_error"], s.div_max, s.flow_report.wall_time + s.heat_report.wall_time, s.config.tol)
           for e, s in sols.items()]
    ok = all(rel <= 1e-8 and div <= 10 * tol and t <= 300 for _, rel, div, t, tol in per)
    detail = "; ".join(f"eps={e:g}: energy rel={rel:.1e}, max|div|={div:.1e}, {t:.1f}s" for e, rel, div, t, _ in per)
    assert record_criterion(6, ok, detail)


def test_criterion_7_eps_convergence(study):
    rows, _, dt = study
    cols = ("u_err_L2", "u3_L2", "q_err_L2", "T_err_L43")
    mono = {c: all(b[c] < a[c] for a, b in zip(rows, rows[1:])) for c in cols}
    ratio = rows[-1]["u3_L2"] / rows[0]["u3_L2"]
    ok = all(mono.values()) and ratio <= 0.5 and dt <= 900
    table = " | ".join(f"eps={r['eps']:g}: " + ", ".join(f"{c}={r[c]:.3e}" for c in cols) for r in rows)
    assert record_criterion(7, ok, f"{table} | U3 last/first={ratio:.3f}, study {dt:.1f}s")


def test_criterion_8_scaling(study):
    _, sols, _ = study
    rows = scaling_diagnostics(sols)
    cols = ("U_L2", "eps_DU_L2", "T_L43", "eps_gradT_L43")
    ratios = {c: max(r[c] for r in rows) / min(r[c] for r in rows) for c in cols}
    vfrac = rows[-1]["vertical_fraction"]
    ok = all(v <= 10 for v in ratios.values()) and vfrac >= 0.5
    detail = ", ".join(f"{c} max/min={v:.2f}" for c, v in ratios.items())
    assert record_criterion(8, ok, f"{detail}; vertical share of eps*|D U| at eps=1/16: {vfrac:.2f}")


BASE_TEXT = """\
params.mu = 1
params.mu_eff = 1
params.K = 1
params.k = 1
params.b = 1
geometry.nz = 16
forcing.spec = sinusoidal(1, 0, 0, 1)
"""
RUNS = {
    "reduced": "run.mode = reduced\ngeometry.nx = 32\ngeometry.ny = 32\ngeometry.gap = parabolic(0.8, 0.6)\n",
    "dilated": "run.mode = dilated\ngeometry.nx = 16\ngeometry.ny = 16\ngeometry.gap = constant(1)\n"
               "dilated.epsilon = 1/8\n",
    "converge": "run.mode = converge\ngeometry.nx = 16\ngeometry.ny = 16\ngeometry.gap = constant(1)\n"
                "study.eps = 1/4, 1/8, 1/16\n",
}


def test_criterion_9_determinism(tmp_path):
    same, total = 0, 0
    for name, extra in RUNS.items():
        cfg = parse_config(BASE_TEXT + extra)
        for rep in ("a", "b"):
            assert run(cfg, tmp_path / name / rep) == 0
        for f in sorted((tmp_path / name / "a").glob("*.csv")):
            total += 1
            same += f.read_bytes() == (tmp_path / name / "b" / f.name).read_bytes()
    ok = total > 0 and same == total
    assert record_criterion(9, ok, f"{same}/{total} CSV artifacts byte-identical across repeated runs")
