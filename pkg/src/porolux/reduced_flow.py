"""Limit velocity profile, mobility and the Reynolds-type pressure equation.

The limit horizontal velocity in each column is ``u(x', z) = P(z) g(x')``
with ``g = f' - grad p`` and

    P(z) = A1 exp(M z) + A2 exp(-M z) + K/mu,

which vanishes at ``z = 0`` and ``z = h``.  Integrating over the column
gives the mobility

    c(h) = (K/mu) (h - (2/M) tanh(M h / 2)),

and the pressure solves ``div(c (grad p - f')) = 0`` with zero normal flux
on the boundary and zero mean.

Every exponential is evaluated in a form bounded by one, so ``M h`` up to
~700 is safe, and the small-``M h`` regime (Poiseuille limit) is handled by
series so no digits are lost to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .core import (ColumnField3D, GapField, Grid2D, ParameterError, PhysicalParams,
                   ScalarField2D, VectorField2D)
from .numerics import ConvergenceError, as_csr, cg_solve, mean_projector

# Variant tags written into run manifests.
REYNOLDS_VARIANT = "c=(K/mu)*(h-(2/M)*tanh(M*h/2)) [numerator e^{Mh}+e^{-Mh}-2]"

# x - 2 tanh(x/2) = sum_n TANH_DEFICIT[n] x^n, odd n >= 3
_TANH_DEFICIT = (
    (3, 1 / 12),
    (5, -1 / 120),
    (7, 17 / 20160),
    (9, -31 / 362880),
    (11, 691 / 79833600),
    (13, -5461 / 6227020800),
    (15, 929569 / 10461394944000),
    (17, -3202291 / 355687428096000),
    (19, 221930581 / 243290200817664000),
    (21, -4722116521 / 51090942171709440000),
    (23, 56963745931 / 6082827467972935680000),
    (25, -14717667114151 / 15511210043330985984000000),
)
_TANH_SERIES_MAX = 0.5


def _tanh_deficit(x):
    """``x - 2 tanh(x/2)`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    small = x < _TANH_SERIES_MAX
    xs = np.where(small, x, 0.0)
    series = np.zeros_like(xs)
    for n, coef in reversed(_TANH_DEFICIT):
        series = series + coef * xs ** n
    direct = x - 2.0 * np.tanh(0.5 * np.where(small, 1.0, x))
    return np.where(small, series, direct)


def _exp_deficit(x, nterms=28):
    """``x (1 + e^-x) - 2 (1 - e^-x)``, the unnormalised column integral.

    Series ``sum_{n>=3} (-1)^(n+1) (n-2) x^n / n!`` below ``x = 1``.
    """
    x = np.asarray(x, dtype=float)
    small = x < 1.0
    xs = np.where(small, x, 0.0)
    series = np.zeros_like(xs)
    term = xs ** 3 / 6.0  # x^n / n! at n = 3
    for n in range(3, 3 + nterms):
        series = series + (-1.0) ** (n + 1) * (n - 2) * term
        term = term * xs / (n + 1)
    xd = np.where(small, 1.0, x)
    direct = xd * (1.0 + np.exp(-xd)) + 2.0 * np.expm1(-xd)
    return np.where(small, series, direct)


def _check_h(h):
    h = np.asarray(h, dtype=float)
    if not np.all(np.isfinite(h) & (h > 0)):
        raise ParameterError("gap values must be finite and > 0")
    return h


def mobility_coefficient(params: PhysicalParams, h):
    """Column mobility ``c(h) = (K/mu)(h - (2/M) tanh(M h/2)) > 0``.

    Accepts scalar or array ``h``; tends to ``h^3 / (12 mu_eff)`` as
    ``M h -> 0``.
    """
    h = _check_h(h)
    c = params.K_over_mu / params.M * _tanh_deficit(params.M * h)
    return float(c) if c.ndim == 0 else c


@dataclass(frozen=True)
class ProfileCoeffs:
    A1: float
    A2: float
    M: float
    h: float
    Kmu: float

    @property
    def x(self) -> float:
        return self.M * self.h


def profile_coeffs(params: PhysicalParams, h: float) -> ProfileCoeffs:
    """Profile coefficients.

    ``A1 = -(K/mu)/(1 + e^{Mh})`` and ``A2 = -(K/mu)/(1 + e^{-Mh})``, which
    are the textbook ratios with ``e^{Mh}`` factored out.
    """
    h = float(_check_h(h))
    Kmu = params.K_over_mu
    x = params.M * h
    A1 = -Kmu * math.exp(-x) / (1.0 + math.exp(-x))
    A2 = -Kmu / (1.0 + math.exp(-x))
    return ProfileCoeffs(A1, A2, params.M, h, Kmu)


def _check_z(coeffs, z):
    z = np.asarray(z, dtype=float)
    slack = 1e-12 * coeffs.h
    if np.any(z < -slack) or np.any(z > coeffs.h + slack) or not np.all(np.isfinite(z)):
        raise ValueError(f"z3 outside [0, {coeffs.h}]")
    return np.clip(z, 0.0, coeffs.h)


def eval_profile(coeffs: ProfileCoeffs, z3):
    """Velocity shape ``P(z3)`` on ``[0, h]``.

    Evaluated as ``(K/mu) expm1(-Mz) expm1(-M(h-z)) / (1 + e^{-Mh})``, an
    exact rewrite of ``A1 e^{Mz} + A2 e^{-Mz} + K/mu`` that is symmetric in
    ``z <-> h - z`` and free of cancellation.
    """
    z = _check_z(coeffs, z3)
    M, h = coeffs.M, coeffs.h
    out = coeffs.Kmu * np.expm1(-M * z) * np.expm1(-M * (h - z)) / (1.0 + math.exp(-M * h))
    return float(out) if out.ndim == 0 else out


def eval_profile_derivative(coeffs: ProfileCoeffs, z3):
    """``dP/dz3 = M (A1 e^{Mz} - A2 e^{-Mz})``."""
    z = _check_z(coeffs, z3)
    M, h = coeffs.M, coeffs.h
    a = M * z
    rest = M * h - a
    lower = a <= rest
    # e^{-a} - e^{-rest}, factored on whichever exponent is smaller
    diff = np.where(lower,
                    -np.exp(-a) * np.expm1(-np.abs(rest - a)),
                    np.exp(-rest) * np.expm1(-np.abs(a - rest)))
    out = coeffs.Kmu * M * diff / (1.0 + math.exp(-M * h))
    return float(out) if out.ndim == 0 else out


def eval_profile_naive(coeffs: ProfileCoeffs, z3):
    """Textbook ``A1 e^{Mz} + A2 e^{-Mz} + K/mu`` (reference only; cancels for small Mh)."""
    z = np.asarray(z3, dtype=float)
    return coeffs.A1 * np.exp(coeffs.M * z) + coeffs.A2 * np.exp(-coeffs.M * z) + coeffs.Kmu


def column_flux(params: PhysicalParams, h):
    """``int_0^h P(z) dz`` from the exponential form of the profile.

    Independent of :func:`mobility_coefficient` (different series and
    direct formula); the two must agree to rounding.
    """
    h = _check_h(h)
    x = params.M * h
    out = params.K_over_mu / params.M * _exp_deficit(x) / (1.0 + np.exp(-x))
    return float(out) if out.ndim == 0 else out


# -- Reynolds equation -------------------------------------------------------

def _harmonic(a, b):
    return 2.0 * a * b / (a + b)


@dataclass(eq=False)
class ReynoldsSystem:
    """Finite-volume discretisation of ``-div(c grad p) = -div(c f')``.

    ``matrix`` is symmetric positive semidefinite with the constants as its
    null space; ``rhs`` sums to zero.
    """

    grid: Grid2D
    matrix: sp.csr_array
    rhs: np.ndarray
    mobility: np.ndarray
    projector: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def flux_divergence(self, p) -> np.ndarray:
        """Discrete ``div(c (f' - grad p))`` per cell for a pressure array."""
        p = np.asarray(p, dtype=float).ravel()
        return ((self.matrix @ p - self.rhs) / self.grid.cell_area).reshape(self.grid.shape)


def assemble_reynolds(grid: Grid2D, gap: GapField, params: PhysicalParams,
                      forcing: VectorField2D) -> ReynoldsSystem:
    """Assemble the 5-point scheme with harmonic face mobilities and zero-flux walls."""
    if gap.grid != grid or forcing.grid != grid:
        raise ParameterError("gap and forcing must live on the assembly grid")
    c = np.asarray(mobility_coefficient(params, gap.values), dtype=float).reshape(grid.shape)
    if not np.all(c > 0):
        raise ParameterError("mobility must be positive in every cell")
    nx, ny = grid.shape
    idx = np.arange(nx * ny).reshape(nx, ny)
    f1, f2 = forcing.x, forcing.y

    rows, cols, vals = [], [], []
    rhs = np.zeros((nx, ny))

    # x-faces between (i, j) and (i+1, j)
    if nx > 1:
        cf = _harmonic(c[:-1, :], c[1:, :])
        t = cf * grid.dy / grid.dx
        flux = cf * 0.5 * (f1[:-1, :] + f1[1:, :]) * grid.dy
        rhs[:-1, :] -= flux
        rhs[1:, :] += flux
        a, b = idx[:-1, :].ravel(), idx[1:, :].ravel()
        t = t.ravel()
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [t, t, -t, -t]
    if ny > 1:
        cf = _harmonic(c[:, :-1], c[:, 1:])
        t = cf * grid.dx / grid.dy
        flux = cf * 0.5 * (f2[:, :-1] + f2[:, 1:]) * grid.dx
        rhs[:, :-1] -= flux
        rhs[:, 1:] += flux
        a, b = idx[:, :-1].ravel(), idx[:, 1:].ravel()
        t = t.ravel()
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [t, t, -t, -t]

    n = nx * ny
    if rows:
        A = sp.coo_array((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))
    else:
        A = sp.csr_array((n, n))
    return ReynoldsSystem(grid, as_csr(A), rhs.ravel(), c, mean_projector())


def solve_pressure(system: ReynoldsSystem, tol=1e-10, maxit=None, return_report=False):
    """Mean-zero pressure from the Reynolds system by projected CG.

    Raises :class:`ConvergenceError` (carrying the report) when ``maxit``
    (default ``10 * nx * ny``) is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = system.grid.size
    if maxit is None:
        maxit = 10 * n
    p, report = cg_solve(system.matrix, system.rhs, tol=tol, maxit=maxit,
                         projector=system.projector)
    if not report.converged:
        raise ConvergenceError(
            f"Reynolds CG did not converge: residual {report.residual:.3e} after "
            f"{report.iterations} iterations", report)
    p = p - p.mean()
    field_ = ScalarField2D(system.grid, p.reshape(system.grid.shape))
    return (field_, report) if return_report else field_


def cell_gradient(values, grid: Grid2D):
    """Gradient at cell centers: central inside, second-order one-sided at walls."""
    v = np.asarray(values, dtype=float)
    return np.stack([_diff_axis(v, grid.dx, 0), _diff_axis(v, grid.dy, 1)])


def _diff_axis(v, d, axis):
    v = np.moveaxis(v, axis, 0)
    n = v.shape[0]
    out = np.zeros_like(v)
    if n >= 3:
        out[1:-1] = (v[2:] - v[:-2]) / (2 * d)
        out[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * d)
        out[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * d)
    elif n == 2:
        out[:] = (v[1] - v[0]) / d
    return np.moveaxis(out, 0, axis)


def driving_force(pressure: ScalarField2D, forcing: VectorField2D) -> np.ndarray:
    """``g = f' - grad p`` at cell centers, shape ``(2, nx, ny)``."""
    if pressure.grid != forcing.grid:
        raise ParameterError("pressure and forcing grids differ")
    return forcing.values - cell_gradient(pressure.values, pressure.grid)


def column_z(gap: GapField, nz: int) -> np.ndarray:
    """Uniform samples ``z_m = m h / nz``, ``m = 0..nz``, per column."""
    if nz < 2:
        raise ValueError("nz must be >= 2")
    s = np.arange(nz + 1) / nz
    return gap.values[..., None] * s


def velocity_field(params: PhysicalParams, gap: GapField, pressure: ScalarField2D,
                   forcing: VectorField2D, nz: int = 64) -> ColumnField3D:
    """Sampled limit velocity; components ``(u1, u2, u3)`` with ``u3 = 0``."""
    grid = gap.grid
    if pressure.grid != grid or forcing.grid != grid:
        raise ParameterError("velocity_field: grid mismatch")
    g = driving_force(pressure, forcing)
    z = column_z(gap, nz)
    P = np.empty_like(z)
    for i in range(grid.nx):
        for j in range(grid.ny):
            P[i, j] = eval_profile(profile_coeffs(params, gap.values[i, j]), z[i, j])
    u = np.zeros((3,) + z.shape)
    u[0] = P * g[0][..., None]
    u[1] = P * g[1][..., None]
    return ColumnField3D(grid, z, u)
