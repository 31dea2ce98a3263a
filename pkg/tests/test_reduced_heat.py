import math

import mpmath as mp
import numpy as np
import pytest

from conftest import random_draws
from porolux.core import (ConstantGap, Grid2D, ParabolicGap, ParameterError, SinusoidalForcing, ZeroForcing,
                          make_gap_field, make_params, sample_forcing)
from porolux.numerics import central_second_difference, nested_trapezoid, observed_orders, richardson_order
from porolux.reduced_flow import (assemble_reynolds, eval_profile, eval_profile_derivative, profile_coeffs,
                                  solve_pressure)
from porolux.reduced_heat import (column_ode_oracle, solve_column_bvp, dissipation_density, make_temperature_profile,
                                  temperature_field, temperature_profile, v1_profile, v1_profile_exponential,
                                  v2_profile, v2_profile_exponential)


def v_oracle(params, h, z, dps=50):
    """``(V1, V2)`` at ``z`` as single integrals ``int_0^z (z - s) f(s) ds`` in high precision."""
    with mp.workdps(dps):
        mu, mu_eff, K, h, z = (mp.mpf(v) for v in (params.mu, params.mu_eff, params.K, h, z))
        M = mp.sqrt(mu / (K * mu_eff))
        Kmu = K / mu
        den = 1 + mp.exp(-M * h)

        def P(s):
            return Kmu * mp.expm1(-M * s) * mp.expm1(-M * (h - s)) / den

        def dP(s):
            return Kmu * M * (mp.exp(-M * s) - mp.exp(-M * (h - s))) / den

        pts = [0, z / 2, z] if z > 0 else [0, 0]
        v1 = mp.quad(lambda s: (z - s) * P(s) ** 2, pts)
        v2 = mp.quad(lambda s: (z - s) * dP(s) ** 2, pts)
        return float(v1), float(v2)


def test_v_zero(unit_params):
    co = profile_coeffs(unit_params, 1.0)
    assert v1_profile(co, 0.0) == 0.0 and v2_profile(co, 0.0) == 0.0


def _nested(co, n, deriv):
    z = np.linspace(0, co.h, n + 1)
    f = eval_profile_derivative(co, z) if deriv else eval_profile(co, z)
    return nested_trapezoid(f * f, co.h / n)[-1]


@pytest.mark.parametrize("deriv, vfun", [(False, v1_profile), (True, v2_profile)])
def test_v_quadrature_4096(unit_params, deriv, vfun):
    co = profile_coeffs(unit_params, 1.0)
    exact = vfun(co, 1.0)
    # raw nested trapezoid converges at order 2 for V2; for V1 the integrand has zero
    # end slopes and the trapezoid is already at round-off
    errs = [abs(_nested(co, n, deriv) - exact) for n in (1024, 2048, 4096)]
    if deriv:
        assert abs(richardson_order(*errs) - 2) < 0.05
    else:
        assert max(errs) <= 1e-11 * exact
    # one Richardson step on the 2048/4096 trapezoid values removes the O(dz^2) term
    q = (4 * _nested(co, 4096, deriv) - _nested(co, 2048, deriv)) / 3
    assert exact == pytest.approx(q, rel=1e-8)


def test_v_vs_mpmath_random():
    for params, h, _, _ in random_draws(30, seed=11):
        co = profile_coeffs(params, h)
        for frac in (0.0, 0.13, 0.5, 0.91, 1.0):
            z = frac * h
            v1, v2 = v_oracle(params, h, z)
            assert v1_profile(co, z) == pytest.approx(v1, rel=1e-11, abs=1e-300)
            assert v2_profile(co, z) == pytest.approx(v2, rel=1e-11, abs=1e-300)


def test_v_second_derivative_fd(unit_params):
    co = profile_coeffs(make_params(1.5, 0.8, 0.6, 1), 1.7)
    z = np.linspace(0.2, 1.5, 9)
    errs1, errs2 = [], []
    for d in (1e-2, 5e-3, 2.5e-3):
        errs1.append(np.abs(central_second_difference(lambda s: v1_profile(co, s), z, d)
                            - eval_profile(co, z) ** 2).max())
        errs2.append(np.abs(central_second_difference(lambda s: v2_profile(co, s), z, d)
                            - eval_profile_derivative(co, z) ** 2).max())
    assert np.all(np.abs(observed_orders(errs1) - 2) < 0.1)
    assert np.all(np.abs(observed_orders(errs2) - 2) < 0.1)


def test_exponential_forms(unit_params):
    p = make_params(1, 1, 1, 0.25)  # k != K so a wrong constant term is visible
    co = profile_coeffs(p, 1.3)
    z = np.array([0.3, 0.9, 1.3])
    np.testing.assert_allclose(v1_profile_exponential(co, z, p.K / p.mu), v1_profile(co, z), rtol=1e-10)
    assert np.abs(v1_profile_exponential(co, z, p.k / p.mu) - v1_profile(co, z)).max() > 1e-3
    np.testing.assert_allclose(v2_profile_exponential(co, z, corrected=True), v2_profile(co, z), rtol=1e-10)
    assert np.abs(v2_profile_exponential(co, z, corrected=False) - v2_profile(co, z)).max() > 1e-3


def test_v_range_error(unit_params):
    co = profile_coeffs(unit_params, 1.0)
    with pytest.raises(ValueError):
        v1_profile(co, 1.5)
    with pytest.raises(ValueError):
        v2_profile(co, -0.5)


def test_temperature_conduction(unit_params):
    p = make_params(1, 1, 1, 1, 1.0)
    tp = make_temperature_profile(p, 1.0, 0.0)
    z = np.linspace(0, 1, 11)
    np.testing.assert_allclose(temperature_profile(tp, z), 1 - z, atol=1e-15)
    assert temperature_profile(tp, 0.0) == 1.0
    tp0 = make_temperature_profile(make_params(1, 1, 1, 1, 0.0), 1.0, 0.0)
    assert np.all(temperature_profile(tp0, z) == 0)


def test_temperature_bad_gmag2(unit_params):
    with pytest.raises(ParameterError):
        make_temperature_profile(unit_params, 1.0, -1.0)


def test_temperature_boundary_random():
    for params, h, g2, bscale in random_draws(200, seed=5):
        p = make_params(params.mu, params.mu_eff, params.K, params.k, 0.0)
        scale0 = make_temperature_profile(p, h, g2).scale
        b = bscale * scale0 * p.k / h
        p = make_params(p.mu, p.mu_eff, p.K, p.k, b)
        tp = make_temperature_profile(p, h, g2)
        assert abs(temperature_profile(tp, h)) <= 1e-10 * tp.scale


def test_dissipation(unit_params):
    tp = make_temperature_profile(unit_params, 1.0, 2.0)
    assert dissipation_density(make_temperature_profile(unit_params, 1.0, 0.0), 0.4) == 0.0
    co = tp.coeffs
    assert dissipation_density(tp, 0.0) == pytest.approx(eval_profile_derivative(co, 0.0) ** 2 * 2.0)
    assert dissipation_density(tp, 0.0) > 0
    z = np.linspace(0, 1, 50)
    assert np.all(dissipation_density(tp, z) >= 0)


def test_ode_residual_random():
    rng = np.random.default_rng(9)
    draws = random_draws(100, seed=13, mh_range=(1e-3, 30.0))
    bad = []
    for params, h, g2, bs in draws:
        s0 = make_temperature_profile(params, h, g2).scale
        p = make_params(params.mu, params.mu_eff, params.K, params.k, bs * s0 * params.k / h)
        tp = make_temperature_profile(p, h, g2)
        z = h * rng.uniform(0.25, 0.75, size=5)
        errs = []
        for d in (h / 64, h / 128, h / 256):
            T2 = central_second_difference(lambda s: temperature_profile(tp, s), z, d)
            errs.append(np.abs(-p.k * T2 - dissipation_density(tp, z)).max())
        order = richardson_order(*errs)
        if not abs(order - 2) <= 0.1:
            bad.append((p, h, errs))
    assert not bad


def test_oracle_equivalence_order():
    p = make_params(1, 1, 1, 1, 0.5)
    tp = make_temperature_profile(p, 1.0, 1.0)
    errs = []
    for nz in (64, 128, 256):
        z, T = column_ode_oracle(p, 1.0, 1.0, nz)
        errs.append(np.abs(T - temperature_profile(tp, z)).max())
    assert abs(richardson_order(*errs) - 2) <= 0.1
    z, T = column_ode_oracle(p, 1.0, 1.0, 2048)
    assert np.abs(T - temperature_profile(tp, z)).max() <= 2 * errs[-1] * (256 / 2048) ** 2


def test_oracle_conduction_exact():
    p = make_params(1, 1, 1, 1, 1.0)
    z, T = column_ode_oracle(p, 1.0, 0.0, 16)
    np.testing.assert_allclose(T, 1 - z, atol=1e-13)
    with pytest.raises(ValueError):
        column_ode_oracle(p, 1.0, 0.0, 4)


def test_bvp_manufactured():
    # -k T'' = k pi^2 sin(pi z) on (0, h), T(h) = 0, -k T'(0) = b with T = sin(pi z) - sin(pi h) + c (z - h)
    k, h = 2.0, 0.8
    c = 0.7
    exact = lambda z: np.sin(np.pi * z) - np.sin(np.pi * h) + c * (z - h)  # noqa: E731
    b = -k * (np.pi + c)
    errs = []
    for nz in (32, 64, 128):
        z = np.linspace(0, h, nz + 1)
        T = solve_column_bvp(k * np.pi ** 2 * np.sin(np.pi * z), h, k, b)
        errs.append(np.abs(T - exact(z)).max())
    assert 1.9 <= richardson_order(*errs) <= 2.1


def test_temperature_field():
    g = Grid2D(6, 5)
    gap = make_gap_field(ParabolicGap(1.0, 0.4), g)
    p1 = make_params(1, 1, 1, 1, 1.0)
    zf = sample_forcing(ZeroForcing(), g)
    pr = solve_pressure(assemble_reynolds(g, gap, p1, zf))
    T = temperature_field(p1, gap, pr, zf, nz=8)
    np.testing.assert_allclose(T.values[0], gap.values[..., None] - T.z, atol=1e-14)
    p0 = make_params(1, 1, 1, 1, 0.0)
    assert np.all(temperature_field(p0, gap, pr, zf, nz=8).values == 0)
    f = sample_forcing(SinusoidalForcing(1, 0.5, 1, 1), g)
    pr = solve_pressure(assemble_reynolds(g, gap, p1, f))
    T = temperature_field(p1, gap, pr, f, nz=8)
    assert T.values.min() >= 0.0
    with pytest.raises(ParameterError):
        temperature_field(p1, make_gap_field(ConstantGap(1), Grid2D(3, 3)), pr, f)


def test_maximum_principle_random():
    for params, h, g2, bs in random_draws(100, seed=17):
        p = make_params(params.mu, params.mu_eff, params.K, params.k, abs(bs))
        tp = make_temperature_profile(p, h, g2)
        T = temperature_profile(tp, np.linspace(0, h, 33))
        assert T.min() >= -1e-10 * tp.scale
