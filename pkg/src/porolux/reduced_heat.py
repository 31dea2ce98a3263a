"""Limit temperature in a column heated by viscous dissipation and a bottom flux.

Per column the limit temperature solves

    -k T'' = Phi(z),   T(h) = 0,   -k T'(0) = b,
    Phi(z) = [(mu/K) P(z)^2 + mu_eff P'(z)^2] |g|^2,

whose solution is

    T(z) = -(mu/(K k)) (V1(z) - V1(h)) |g|^2
           -(mu_eff/k) (V2(z) - V2(h)) |g|^2 - (b/k)(z - h),

with ``V1 = int_0^z int_0^tau P^2`` and ``V2 = int_0^z int_0^tau (P')^2``.
The bottom-flux term does not carry the ``|g|^2`` factor.

``column_ode_oracle`` solves the same two-point problem by finite
differences and is used to cross-check the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .core import ColumnField3D, GapField, ParameterError, PhysicalParams, ScalarField2D, VectorField2D
from .numerics import tridiag_solve
from .reduced_flow import (ProfileCoeffs, _check_z, column_z, driving_force, eval_profile,
                           eval_profile_derivative, profile_coeffs)

V1_VARIANT = "V1 constant term K/mu (not the conductivity ratio k/mu)"
V2_VARIANT = ("V2 = M^2 int int (A1 e^{Ms} - A2 e^{-Ms})^2: "
              "(1/4)(A1^2(e^{2Mz}-1) + A2^2(e^{-2Mz}-1)) - M^2 A1 A2 z^2 - (M/2)(A1^2-A2^2) z")
BOUNDARY_VARIANT = "bottom-flux term -(b/k)(z-h) without |f'-grad p|^2 factor"

_SERIES_BRANCH = 1.0  # M h below this uses the polynomial expansion
_SERIES_TERMS = 10


# -- phi_2(x) = (e^x - 1 - x) / x^2 and its scaled variant -------------------

def _phi2_series(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    term = np.full_like(x, 0.5)
    for n in range(2, 20):
        out = out + term
        term = term * x / (n + 1)
    return out


def _phi2_neg(lam):
    """``phi_2(-lam)`` for ``lam >= 0``."""
    lam = np.asarray(lam, dtype=float)
    small = lam < 0.5
    ls = np.where(small, 1.0, lam)
    direct = (np.expm1(-ls) + ls) / ls ** 2
    return np.where(small, _phi2_series(-np.where(small, lam, 0.0)), direct)


def _phi2_scaled(lam, shift):
    """``e^{-shift} phi_2(lam)`` for ``0 <= lam <= shift`` without overflow."""
    lam = np.asarray(lam, dtype=float)
    small = lam < 0.5
    ls = np.where(small, 1.0, lam)
    direct = (np.exp(ls - shift) - np.exp(-shift) * (1.0 + ls)) / ls ** 2
    series = math.exp(-shift) * _phi2_series(np.where(small, lam, 0.0))
    return np.where(small, series, direct)


# -- small-Mh polynomial representation --------------------------------------

@lru_cache(maxsize=4096)
def _series_polys(Kmu: float, x: float):
    """Double integrals of ``P^2`` and ``(dP/dt)^2`` in ``t = 2z/h - 1``.

    ``P = Kmu w^2 S(t) / cosh(w)`` with ``w = x/2`` and
    ``S(t) = sum_{n>=1} w^(2n-2) (1 - t^(2n)) / (2n)!``.
    """
    w = 0.5 * x
    coef = np.zeros(2 * _SERIES_TERMS + 1)
    for n in range(1, _SERIES_TERMS + 1):
        a = w ** (2 * n - 2) / math.factorial(2 * n)
        coef[0] += a
        coef[2 * n] -= a
    scale = Kmu * w * w / math.cosh(w)
    P = Polynomial(coef) * scale
    dP = P.deriv()
    I1 = (P * P).integ(m=2, lbnd=-1.0)
    I2 = (dP * dP).integ(m=2, lbnd=-1.0)
    return I1, I2


def _v1_v2(coeffs: ProfileCoeffs, z):
    M, h, Kmu = coeffs.M, coeffs.h, coeffs.Kmu
    x = M * h
    if x < _SERIES_BRANCH:
        I1, I2 = _series_polys(Kmu, x)
        t = 2.0 * z / h - 1.0
        return 0.25 * h * h * I1(t), I2(t)
    a = M * z
    alpha = Kmu / (1.0 + math.exp(-x))
    ex = math.exp(-x)
    e1 = _phi2_scaled(2 * a, 2 * x)
    e0 = _phi2_neg(2 * a)
    v1 = z * z * (alpha * alpha * (e1 + e0 + ex) + 0.5 * Kmu * Kmu
                  - 2 * Kmu * alpha * (_phi2_scaled(a, x) + _phi2_neg(a)))
    v2 = a * a * alpha * alpha * (e1 + e0 - ex)
    return v1, v2


def _scalar(out):
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def v1_profile(coeffs: ProfileCoeffs, z3):
    """``V1(z) = int_0^z int_0^tau P(s)^2 ds dtau``."""
    z = _check_z(coeffs, z3)
    return _scalar(_v1_v2(coeffs, z)[0])


def v2_profile(coeffs: ProfileCoeffs, z3):
    """``V2(z) = int_0^z int_0^tau P'(s)^2 ds dtau``."""
    z = _check_z(coeffs, z3)
    return _scalar(_v1_v2(coeffs, z)[1])


def v1_profile_exponential(coeffs: ProfileCoeffs, z3, const):
    """Exponential form of V1 with ``const`` in place of the profile constant.

    ``const = K/mu`` gives the correct value; ``const = k/mu`` is the
    conductivity-ratio variant.  Reference only: cancels for small ``M h``.
    """
    A1, A2, M = coeffs.A1, coeffs.A2, coeffs.M
    z = np.asarray(z3, dtype=float)
    return ((A1 ** 2 * np.expm1(2 * M * z) + A2 ** 2 * np.expm1(-2 * M * z)) / (4 * M ** 2)
            + 2 * const / M ** 2 * (A1 * np.expm1(M * z) + A2 * np.expm1(-M * z))
            + (const ** 2 / 2 + A1 * A2) * z ** 2
            - (A1 ** 2 - A2 ** 2) * z / (2 * M) - 2 * const / M * (A1 - A2) * z)


def v2_profile_exponential(coeffs: ProfileCoeffs, z3, corrected=True):
    """Exponential form of V2; ``corrected=False`` flips the A2^2 and A1 A2 signs."""
    A1, A2, M = coeffs.A1, coeffs.A2, coeffs.M
    z = np.asarray(z3, dtype=float)
    s = 1.0 if corrected else -1.0
    return (0.25 * (A1 ** 2 * np.expm1(2 * M * z) + s * A2 ** 2 * np.expm1(-2 * M * z))
            - s * M ** 2 * A1 * A2 * z ** 2 - 0.5 * M * (A1 ** 2 - A2 ** 2) * z)


# -- temperature -------------------------------------------------------------

@dataclass(frozen=True)
class TemperatureProfile:
    coeffs: ProfileCoeffs
    gmag2: float
    b: float
    k: float
    mu: float
    mu_eff: float
    K: float

    @property
    def M(self) -> float:
        return self.coeffs.M

    @property
    def h(self) -> float:
        return self.coeffs.h

    @property
    def scale(self) -> float:
        """Magnitude used for relative checks: conduction plus dissipation."""
        v1h, v2h = _v1_v2(self.coeffs, np.float64(self.h))
        diss = (self.mu / (self.K * self.k) * v1h + self.mu_eff / self.k * v2h) * self.gmag2
        return abs(self.b) * self.h / self.k + abs(float(diss))


def make_temperature_profile(params: PhysicalParams, h: float, gmag2: float) -> TemperatureProfile:
    if gmag2 < 0 or not math.isfinite(gmag2):
        raise ParameterError("gmag2 must be finite and >= 0")
    return TemperatureProfile(profile_coeffs(params, h), float(gmag2), params.b, params.k,
                              params.mu, params.mu_eff, params.K)


def temperature_profile(tp: TemperatureProfile, z3):
    """Closed-form limit temperature in one column."""
    z = _check_z(tp.coeffs, z3)
    v1, v2 = _v1_v2(tp.coeffs, z)
    v1h, v2h = _v1_v2(tp.coeffs, np.float64(tp.h))
    T = (-(tp.mu / (tp.K * tp.k)) * (v1 - v1h) * tp.gmag2
         - (tp.mu_eff / tp.k) * (v2 - v2h) * tp.gmag2
         - (tp.b / tp.k) * (z - tp.h))
    return _scalar(T)


def dissipation_density(tp: TemperatureProfile, z3):
    """``[(mu/K) P^2 + mu_eff P'^2] |g|^2`` (nonnegative)."""
    P = np.asarray(eval_profile(tp.coeffs, z3))
    dP = np.asarray(eval_profile_derivative(tp.coeffs, z3))
    return _scalar((tp.mu / tp.K * P * P + tp.mu_eff * dP * dP) * tp.gmag2)


def solve_column_bvp(source, h, k, b):
    """Second-order FD for ``-k T'' = source`` with ``T(h) = 0`` and ``-k T'(0) = b``.

    ``source`` holds values at the ``nz + 1`` uniform nodes ``z_j = j h / nz``.
    The Neumann end uses a ghost node; the system is tridiagonal and solved
    directly.
    """
    f = np.asarray(source, dtype=float)
    nz = f.shape[0] - 1
    dz = h / nz
    c = k / dz ** 2
    n = nz  # unknowns T_0 .. T_{nz-1}
    diag = np.full(n, 2 * c)
    off = np.full(n, -c)
    rhs = f[:n].copy()
    diag[0] = c  # ghost-node row halved to keep the matrix symmetric
    rhs[0] = 0.5 * f[0] + b / dz
    T = np.zeros(nz + 1)
    T[:n] = tridiag_solve(off, diag, off, rhs)
    return T


def column_ode_oracle(params: PhysicalParams, h: float, gmag2: float, nz: int):
    """Finite-difference temperature on ``nz + 1`` nodes; returns ``(z, T)``."""
    if nz < 8:
        raise ValueError("nz must be >= 8")
    tp = make_temperature_profile(params, h, gmag2)
    z = np.linspace(0.0, h, nz + 1)
    phi = np.asarray(dissipation_density(tp, z))
    return z, solve_column_bvp(phi, h, params.k, params.b)


def temperature_field(params: PhysicalParams, gap: GapField, pressure: ScalarField2D,
                      forcing: VectorField2D, nz: int = 64) -> ColumnField3D:
    """Closed-form temperature sampled on ``nz + 1`` points in every column."""
    grid = gap.grid
    if pressure.grid != grid or forcing.grid != grid:
        raise ParameterError("temperature_field: grid mismatch")
    g = driving_force(pressure, forcing)
    gmag2 = g[0] ** 2 + g[1] ** 2
    z = column_z(gap, nz)
    T = np.empty_like(z)
    for i in range(grid.nx):
        for j in range(grid.ny):
            tp = make_temperature_profile(params, gap.values[i, j], gmag2[i, j])
            T[i, j] = temperature_profile(tp, z[i, j])
    return ColumnField3D(grid, z, T)
