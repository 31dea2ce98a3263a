"""Staggered-grid solver for the dilated 3D Darcy-Brinkman-heat system on a box.

The thin layer ``{0 < x3 < eps h}`` is dilated to ``omega x (0, h)`` with
``z3 = x3 / eps``, so that ``D_eps``, ``grad_eps`` and ``div_eps`` carry the
factor ``1/eps`` on every vertical derivative.  With the scaled pressure
``Q = eps^2 p`` the momentum system multiplied by ``eps^2`` reads

    -2 mu_eff eps^2 div_eps(D_eps U) + (mu/K) U + grad_eps Q = (f', 0),
    div_eps U = 0,    U = 0 on the whole boundary,

and the temperature solves

    -k (eps^2 lap' + d_z^2) T = (mu/K)|U|^2 + 2 mu_eff eps^2 |D_eps U|^2,
    T = 0 on top and lateral faces,   -k d_z T = b on the bottom.

Layout (MAC): ``u1`` on x-faces ``(nx-1, ny, nz)``, ``u2`` on y-faces
``(nx, ny-1, nz)``, ``u3`` on z-faces ``(nx, ny, nz-1)`` (wall faces are
zero and not stored); ``Q`` and ``T`` at cell centres.  Strain components
live at cells (diagonal) and on edges (off-diagonal); walls enter through
ghost reflection.  All operators are Kronecker products of 1D stencils so
the discrete momentum operator is exactly ``2 mu_eff eps^2 B^T W B + mu/K``
and the energy identity holds to solver precision.

The saddle point is solved by CG on the pressure Schur complement (Uzawa
iteration with conjugate-gradient steps); every Schur application is an
inner Jacobi-preconditioned CG solve for the velocity.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .core import (ConstantGap, ForcingSpec, Grid2D, ParameterError, PhysicalParams, ScalarField2D,
                   ZeroForcing, make_gap_field, sample_forcing)
from .numerics import ConvergenceError, SolveReport, as_csr, cg_solve, midpoint_norm
from .reduced_flow import assemble_reynolds, driving_force, eval_profile, profile_coeffs, solve_pressure
from .reduced_heat import make_temperature_profile, temperature_profile

log = logging.getLogger(__name__)

Q_NORM = 4.0 / 3.0


@dataclass(frozen=True)
class DilatedConfig:
    epsilon: float
    params: PhysicalParams
    forcing: ForcingSpec = field(default_factory=ZeroForcing)
    nx: int = 32
    ny: int = 32
    nz: int = 16
    lx: float = 1.0
    ly: float = 1.0
    h: float = 1.0
    tol: float = 1e-8
    maxit: int = 500
    inner_tol: float = 1e-12
    heat_tol: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise ParameterError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        if min(self.nx, self.ny, self.nz) < 2:
            raise ParameterError("3D grid needs at least 2 cells per direction")
        if not (self.h > 0 and self.lx > 0 and self.ly > 0):
            raise ParameterError("box extents must be positive")
        if not (self.tol > 0 and self.inner_tol > 0 and self.heat_tol > 0 and self.maxit >= 1):
            raise ParameterError("solver tolerances must be positive")

    @property
    def grid(self) -> Grid2D:
        return Grid2D(self.nx, self.ny, self.lx, self.ly)

    @property
    def spacing(self):
        return self.lx / self.nx, self.ly / self.ny, self.h / self.nz

    @property
    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz


# -- 1D stencils -------------------------------------------------------------

def _face_to_cell(n, d):
    """Difference of interior-face values into cells (walls carry 0); ``n x (n-1)``."""
    return sp.diags([np.full(n - 1, 1.0 / d), np.full(n - 1, -1.0 / d)], [0, -1],
                    shape=(n, n - 1), format="csr")


def _cell_to_face(n, d):
    """Difference of cell values onto all ``n+1`` faces, zero ghost reflection at walls."""
    A = sp.lil_matrix((n + 1, n))
    for f in range(1, n):
        A[f, f] = 1.0 / d
        A[f, f - 1] = -1.0 / d
    A[0, 0] = 2.0 / d
    A[n, n - 1] = -2.0 / d
    return A.tocsr()


def _embed(n):
    """Interior faces into all ``n+1`` faces (wall rows zero)."""
    return sp.eye(n + 1, n - 1, k=-1, format="csr")


def _face_to_cell_avg(n):
    """Average of the two faces bounding each cell; wall faces carry 0."""
    return sp.diags([np.full(n - 1, 0.5), np.full(n - 1, 0.5)], [0, -1], shape=(n, n - 1), format="csr")


def _edge_to_cell_avg(n):
    """Average of the two nodes (``n+1`` of them) bounding each cell."""
    return sp.diags([np.full(n, 0.5), np.full(n, 0.5)], [0, 1], shape=(n, n + 1), format="csr")


def _wall_weights(n):
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return w


def _k3(a, b, c):
    return sp.kron(a, sp.kron(b, c, format="csr"), format="csr")


class _Operators:
    """Discrete strain, divergence and heat operators for one configuration."""

    def __init__(self, cfg: DilatedConfig):
        nx, ny, nz = cfg.nx, cfg.ny, cfg.nz
        dx, dy, dz = cfg.spacing
        eps = cfg.epsilon
        self.cfg = cfg
        Ix, Iy, Iz = sp.eye(nx), sp.eye(ny), sp.eye(nz)
        Gx, Gy, Gz = _face_to_cell(nx, dx), _face_to_cell(ny, dy), _face_to_cell(nz, dz)
        Cx, Cy, Cz = _cell_to_face(nx, dx), _cell_to_face(ny, dy), _cell_to_face(nz, dz)
        Ex, Ey, Ez = _embed(nx), _embed(ny), _embed(nz)
        self.n1 = (nx - 1) * ny * nz
        self.n2 = nx * (ny - 1) * nz
        self.n3 = nx * ny * (nz - 1)
        self.shapes = ((nx - 1, ny, nz), (nx, ny - 1, nz), (nx, ny, nz - 1))
        n1, n2, n3 = self.n1, self.n2, self.n3
        ncell = nx * ny * nz

        def row(*blocks):
            return sp.hstack(blocks, format="csr")

        Z = lambda m, n: sp.csr_matrix((m, n))  # noqa: E731
        n12, n13, n23 = (nx + 1) * (ny + 1) * nz, (nx + 1) * ny * (nz + 1), nx * (ny + 1) * (nz + 1)

        # horizontal (no 1/eps) and vertical (times 1/eps) parts of D_eps
        Bh = sp.vstack([
            row(_k3(Gx, Iy, Iz), Z(ncell, n2), Z(ncell, n3)),
            row(Z(ncell, n1), _k3(Ix, Gy, Iz), Z(ncell, n3)),
            Z(ncell, n1 + n2 + n3),
            row(0.5 * _k3(Ex, Cy, Iz), 0.5 * _k3(Cx, Ey, Iz), Z(n12, n3)),
            row(Z(n13, n1), Z(n13, n2), 0.5 * _k3(Cx, Iy, Ez)),
            row(Z(n23, n1), Z(n23, n2), 0.5 * _k3(Ix, Cy, Ez)),
        ], format="csr")
        Bv = sp.vstack([
            Z(2 * ncell, n1 + n2 + n3),
            row(Z(ncell, n1), Z(ncell, n2), _k3(Ix, Iy, Gz)),
            Z(n12, n1 + n2 + n3),
            row(0.5 * _k3(Ex, Iy, Cz), Z(n13, n2), Z(n13, n3)),
            row(Z(n23, n1), 0.5 * _k3(Ix, Ey, Cz), Z(n23, n3)),
        ], format="csr")
        self.Bh, self.Bv = Bh, Bv
        self.B = as_csr(Bh + Bv / eps)
        wx, wy, wz = _wall_weights(nx), _wall_weights(ny), _wall_weights(nz)
        self.strain_sizes = (ncell, ncell, ncell, n12, n13, n23)
        # off-diagonal entries appear twice in D:D
        self.w = np.concatenate([
            np.ones(3 * ncell),
            2.0 * np.kron(wx, np.kron(wy, np.ones(nz))),
            2.0 * np.kron(wx, np.kron(np.ones(ny), wz)),
            2.0 * np.kron(np.ones(nx), np.kron(wy, wz)),
        ])
        p = cfg.params
        W = sp.diags(self.w)
        self.A = as_csr(2.0 * p.mu_eff * eps ** 2 * (self.B.T @ W @ self.B)
                        + (p.mu / p.K) * sp.eye(n1 + n2 + n3))
        self.Div = as_csr(row(_k3(Gx, Iy, Iz), _k3(Ix, Gy, Iz), _k3(Ix, Iy, Gz) / eps))
        self.DivT = as_csr(self.Div.T)

        # averaging to cell centres
        self.avg_u = (_k3(_face_to_cell_avg(nx), Iy, Iz), _k3(Ix, _face_to_cell_avg(ny), Iz),
                      _k3(Ix, Iy, _face_to_cell_avg(nz)))
        Ax, Ay, Az = _edge_to_cell_avg(nx), _edge_to_cell_avg(ny), _edge_to_cell_avg(nz)
        self.avg_edge = (_k3(Ax, Ay, Iz), _k3(Ax, Iy, Az), _k3(Ix, Ay, Az))

        # 7-point heat operator: Dirichlet ghosts on lateral/top faces, flux on the bottom
        k = p.k
        Lx = self._dirichlet_1d(nx, dx)
        Ly = self._dirichlet_1d(ny, dy)
        Lz = self._mixed_1d(nz, dz)
        self.H = as_csr(k * (eps ** 2 * (_k3(Lx, Iy, Iz) + _k3(Ix, Ly, Iz)) + _k3(Ix, Iy, Lz)))

    @staticmethod
    def _dirichlet_1d(n, d):
        main = np.full(n, 2.0)
        main[0] = main[-1] = 3.0
        return sp.diags([main, -np.ones(n - 1), -np.ones(n - 1)], [0, 1, -1], format="csr") / d ** 2

    @staticmethod
    def _mixed_1d(n, d):
        main = np.full(n, 2.0)
        main[0] = 1.0   # zero-gradient ghost at the bottom, flux added to the rhs
        main[-1] = 3.0  # T = 0 on the top face
        return sp.diags([main, -np.ones(n - 1), -np.ones(n - 1)], [0, 1, -1], format="csr") / d ** 2

    def split(self, U):
        return (U[:self.n1], U[self.n1:self.n1 + self.n2], U[self.n1 + self.n2:])

    def strain_blocks(self, U):
        """Strain components ``(D11, D22, D33, D12, D13, D23)`` as flat arrays."""
        S = self.B @ U
        return np.split(S, np.cumsum(self.strain_sizes)[:-1])


@dataclass(frozen=True, eq=False)
class DilatedSolution:
    """Staggered velocity, scaled pressure and temperature from :func:`solve_dilated`.

    ``u1``, ``u2``, ``u3`` hold interior faces only (wall faces are zero);
    ``Q`` and ``T`` are ``(nx, ny, nz)`` cell arrays.
    """

    config: DilatedConfig
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    Q: np.ndarray
    T: np.ndarray
    flow_report: SolveReport
    heat_report: SolveReport
    energy: dict
    div_max: float
    _ops: _Operators = field(repr=False, default=None)

    @property
    def U(self):
        return np.concatenate([self.u1.ravel(), self.u2.ravel(), self.u3.ravel()])

    def cell_velocity(self):
        """Face velocities averaged to cell centres, ``(3, nx, ny, nz)``."""
        ops = self._ops
        shape = (self.config.nx, self.config.ny, self.config.nz)
        return np.stack([(A @ u.ravel()).reshape(shape)
                         for A, u in zip(ops.avg_u, (self.u1, self.u2, self.u3))])


# -- pieces of the solve -----------------------------------------------------

def _forcing_vector(cfg: DilatedConfig, ops: _Operators):
    dx, dy, _ = cfg.spacing
    xf = np.arange(1, cfg.nx) * dx
    yc = (np.arange(cfg.ny) + 0.5) * dy
    xc = (np.arange(cfg.nx) + 0.5) * dx
    yf = np.arange(1, cfg.ny) * dy
    X1, Y1 = np.meshgrid(xf, yc, indexing="ij")
    X2, Y2 = np.meshgrid(xc, yf, indexing="ij")
    f1 = np.asarray(cfg.forcing(X1, Y1)[0], dtype=float)
    f2 = np.asarray(cfg.forcing(X2, Y2)[1], dtype=float)
    F1 = np.repeat(np.broadcast_to(f1, X1.shape)[..., None], cfg.nz, axis=2)
    F2 = np.repeat(np.broadcast_to(f2, X2.shape)[..., None], cfg.nz, axis=2)
    return np.concatenate([F1.ravel(), F2.ravel(), np.zeros(ops.n3)])


def _velocity_solve(ops, rhs, tol):
    x, rep = cg_solve(ops.A, rhs, tol=tol, maxit=20 * rhs.shape[0])
    if not rep.converged:
        raise ConvergenceError(f"inner velocity CG stalled at residual {rep.residual:.3e}", rep)
    return x


def _uzawa_cg(ops: _Operators, F, cfg: DilatedConfig):
    """CG on the Schur complement ``Div A^{-1} Div^T Q = -Div A^{-1} F``."""
    t0 = time.perf_counter()
    ncell = ops.Div.shape[0]
    proj = lambda v: v - v.mean()  # noqa: E731
    U = _velocity_solve(ops, F, cfg.inner_tol)
    Q = np.zeros(ncell)
    r = proj(-(ops.Div @ U))
    history = [float(np.abs(r).max())]
    it = 0
    if history[-1] > cfg.tol:
        p = r.copy()
        rr = float(r @ r)
        while it < cfg.maxit:
            dU = _velocity_solve(ops, ops.DivT @ p, cfg.inner_tol)
            w = ops.Div @ dU
            pw = float(p @ w)
            if not (pw > 0.0):
                break
            alpha = rr / pw
            Q += alpha * p
            U += alpha * dU
            r = proj(r - alpha * w)
            it += 1
            history.append(float(np.abs(r).max()))
            log.debug("uzawa it=%d max|div|=%.3e", it, history[-1])
            if history[-1] <= cfg.tol:
                break
            rr_new = float(r @ r)
            p = r + (rr_new / rr) * p
            rr = rr_new
    # recompute the velocity from the final pressure to shed accumulated drift
    Q = proj(Q)
    U = _velocity_solve(ops, F + ops.DivT @ Q, cfg.inner_tol)
    div_max = float(np.abs(ops.Div @ U).max())
    rep = SolveReport(it, div_max, div_max <= cfg.tol, time.perf_counter() - t0, history)
    if not rep.converged:
        raise ConvergenceError(
            f"Uzawa iteration did not reach max|div U| <= {cfg.tol:g} after {it} steps "
            f"(final {div_max:.3e}); trace tail {history[-5:]}", rep)
    return U, Q, rep


def _dissipation(ops: _Operators, U, cfg: DilatedConfig):
    """Cell-centred ``(mu/K)|U|^2 + 2 mu_eff eps^2 |D_eps U|^2``."""
    p = cfg.params
    u_c = [A @ u for A, u in zip(ops.avg_u, ops.split(U))]
    S11, S22, S33, S12, S13, S23 = ops.strain_blocks(U)
    e12, e13, e23 = (A @ s for A, s in zip(ops.avg_edge, (S12, S13, S23)))
    DD = S11 ** 2 + S22 ** 2 + S33 ** 2 + 2.0 * (e12 ** 2 + e13 ** 2 + e23 ** 2)
    return (p.mu / p.K) * sum(u * u for u in u_c) + 2.0 * p.mu_eff * cfg.epsilon ** 2 * DD


def _heat_solve(ops: _Operators, source, cfg: DilatedConfig):
    nx, ny, nz = cfg.nx, cfg.ny, cfg.nz
    _, _, dz = cfg.spacing
    rhs = source.reshape(nx, ny, nz).copy()
    rhs[:, :, 0] += cfg.params.b / dz
    T, rep = cg_solve(ops.H, rhs.ravel(), tol=cfg.heat_tol, maxit=20 * rhs.size)
    if not rep.converged:
        raise ConvergenceError(f"heat CG stalled at residual {rep.residual:.3e}", rep)
    return T, rep


def energy_report(ops: _Operators, U, F, cfg: DilatedConfig) -> dict:
    """Both sides of ``2 mu_eff eps^2 ||D U||^2 + (mu/K)||U||^2 = (f', U')``."""
    vol = cfg.cell_volume
    p = cfg.params
    S = ops.B @ U
    strain = 2.0 * p.mu_eff * cfg.epsilon ** 2 * vol * float(ops.w @ (S * S))
    darcy = (p.mu / p.K) * vol * float(U @ U)
    work = vol * float(F @ U)
    lhs = strain + darcy
    rel = abs(lhs - work) / max(abs(work), abs(lhs), np.finfo(float).tiny)
    return {"strain": strain, "darcy": darcy, "lhs": lhs, "work": work,
            "rel_error": rel if (lhs or work) else 0.0}


def solve_dilated(config: DilatedConfig) -> DilatedSolution:
    """Velocity, scaled pressure and temperature of the dilated system."""
    ops = _Operators(config)
    F = _forcing_vector(config, ops)
    U, Q, flow_rep = _uzawa_cg(ops, F, config)
    T, heat_rep = _heat_solve(ops, _dissipation(ops, U, config), config)
    shape = (config.nx, config.ny, config.nz)
    u1, u2, u3 = (u.reshape(s) for u, s in zip(ops.split(U), ops.shapes))
    energy = energy_report(ops, U, F, config)
    log.info("eps=%g: uzawa %d its, max|div|=%.2e, energy rel %.2e, heat %d its",
             config.epsilon, flow_rep.iterations, flow_rep.residual, energy["rel_error"],
             heat_rep.iterations)
    return DilatedSolution(config, u1, u2, u3, Q.reshape(shape), T.reshape(shape), flow_rep,
                           heat_rep, energy, flow_rep.residual, ops)


# -- post-processing ---------------------------------------------------------

def vertical_average_pressure(solution: DilatedSolution) -> ScalarField2D:
    """Vertical mean of ``Q`` per column, re-centred to mean zero."""
    qbar = solution.Q.mean(axis=2)
    return ScalarField2D(solution.config.grid, qbar - qbar.mean())


def _temperature_gradient_cells(sol: DilatedSolution):
    """``(eps d_x T, eps d_y T, d_z T)`` at cell centres from face differences."""
    cfg = sol.config
    dx, dy, dz = cfg.spacing
    T = sol.T
    eps = cfg.epsilon

    def faces(T, d, axis, low, high):
        # low/high: ghost rule at the two walls ("dir" -> T=0 on the wall, "flux" -> given gradient)
        n = T.shape[axis]
        g = np.diff(T, axis=axis) / d
        first = np.take(T, [0], axis=axis)
        last = np.take(T, [n - 1], axis=axis)
        lo = 2.0 * first / d if low == "dir" else np.full_like(first, low)
        hi = -2.0 * last / d
        del high
        return np.concatenate([lo, g, hi], axis=axis)

    gx = faces(T, dx, 0, "dir", "dir")
    gy = faces(T, dy, 1, "dir", "dir")
    gz = faces(T, dz, 2, -cfg.params.b / cfg.params.k, "dir")
    cx = 0.5 * (gx[1:] + gx[:-1])
    cy = 0.5 * (gy[:, 1:] + gy[:, :-1])
    cz = 0.5 * (gz[:, :, 1:] + gz[:, :, :-1])
    return eps * cx, eps * cy, cz


def solution_norms(sol: DilatedSolution) -> dict:
    """Norms entering the a priori scaling table."""
    cfg = sol.config
    ops = sol._ops
    vol = cfg.cell_volume
    U = sol.U
    Sh = cfg.epsilon * (ops.Bh @ U)
    Sv = ops.Bv @ U
    wn = lambda s: math.sqrt(vol * float(ops.w @ (s * s)))  # noqa: E731
    gx, gy, gz = _temperature_gradient_cells(sol)
    return {
        "U": math.sqrt(vol * float(U @ U)),
        "eps_DU": wn(Sh + Sv),
        "eps_DU_horizontal": wn(Sh),
        "eps_DU_vertical": wn(Sv),
        "T": midpoint_norm(sol.T, vol, Q_NORM),
        "eps_gradT": midpoint_norm(np.sqrt(gx ** 2 + gy ** 2 + gz ** 2), vol, Q_NORM),
    }


def scaling_diagnostics(solutions) -> list[dict]:
    """One row per ``eps``: ``||U||``, ``eps||D_eps U||`` (with block split), ``||T||``, ``eps||grad_eps T||``."""
    items = sorted(solutions.items(), key=lambda kv: -kv[0])
    if len(items) < 2:
        raise ValueError("scaling_diagnostics needs at least two values of eps")
    rows = []
    for eps, sol in items:
        n = solution_norms(sol)
        frac = n["eps_DU_vertical"] / n["eps_DU"] if n["eps_DU"] > 0 else 0.0
        rows.append({"eps": float(eps), "U_L2": n["U"], "eps_DU_L2": n["eps_DU"],
                     "eps_DU_horizontal": n["eps_DU_horizontal"],
                     "eps_DU_vertical": n["eps_DU_vertical"], "vertical_fraction": frac,
                     "T_L43": n["T"], "eps_gradT_L43": n["eps_gradT"]})
    return rows


@dataclass(frozen=True, eq=False)
class LimitReference:
    """Limit fields sampled at the 3D cell centres."""

    pressure: np.ndarray  # (nx, ny), mean zero
    velocity: np.ndarray  # (2, nx, ny, nz)
    temperature: np.ndarray  # (nx, ny, nz)


def limit_reference(cfg: DilatedConfig, tol=1e-12) -> LimitReference:
    grid = cfg.grid
    gap = make_gap_field(ConstantGap(cfg.h), grid)
    forcing = sample_forcing(cfg.forcing, grid)
    system = assemble_reynolds(grid, gap, cfg.params, forcing)
    p = solve_pressure(system, tol=tol)
    g = driving_force(p, forcing)
    zc = (np.arange(cfg.nz) + 0.5) * cfg.spacing[2]
    P = np.asarray(eval_profile(profile_coeffs(cfg.params, cfg.h), zc))
    u = g[:, :, :, None] * P[None, None, None, :]
    gmag2 = g[0] ** 2 + g[1] ** 2
    T = np.empty((cfg.nx, cfg.ny, cfg.nz))
    for i in range(cfg.nx):
        for j in range(cfg.ny):
            T[i, j] = temperature_profile(make_temperature_profile(cfg.params, cfg.h, gmag2[i, j]), zc)
    return LimitReference(p.values.copy(), u, T)


def convergence_errors(sol: DilatedSolution, ref: LimitReference) -> dict:
    cfg = sol.config
    vol = cfg.cell_volume
    uc = sol.cell_velocity()
    qbar = vertical_average_pressure(sol).values
    return {
        "eps": cfg.epsilon,
        "u_err_L2": midpoint_norm(np.sqrt((uc[0] - ref.velocity[0]) ** 2
                                          + (uc[1] - ref.velocity[1]) ** 2), vol, 2.0),
        "u3_L2": midpoint_norm(uc[2], vol, 2.0),
        "q_err_L2": midpoint_norm(qbar - ref.pressure, cfg.grid.cell_area, 2.0),
        "T_err_L43": midpoint_norm(sol.T - ref.temperature, vol, Q_NORM),
    }


def _worker_count(n):
    env = os.environ.get("POROLUX_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer POROLUX_THREADS=%r", env)
    return max(1, min(n, cap))


def convergence_study(base_config: DilatedConfig, eps_list, return_solutions=False):
    """Error table against the limit model for each ``eps`` (strictly decreasing list).

    Solves for distinct ``eps`` are independent and may run on worker
    threads (capped by ``POROLUX_THREADS``); rows are always returned in
    ``eps_list`` order and each solve is deterministic, so the table does
    not depend on scheduling.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be non-empty and strictly decreasing")
    dz = base_config.spacing[2]
    for e in eps_list:
        if e < 2 * dz:
            log.info("eps=%g is below 2*dz=%g; vertical resolution is marginal", e, 2 * dz)
    configs = [_replace_eps(base_config, e) for e in eps_list]
    ref = limit_reference(base_config)
    workers = _worker_count(len(configs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sols = list(pool.map(solve_dilated, configs))
    else:
        sols = [solve_dilated(c) for c in configs]
    rows = [convergence_errors(s, ref) for s in sols]
    if return_solutions:
        return rows, {c.epsilon: s for c, s in zip(configs, sols)}
    return rows


def _replace_eps(cfg: DilatedConfig, eps: float) -> DilatedConfig:
    from dataclasses import replace
    return replace(cfg, epsilon=eps)
