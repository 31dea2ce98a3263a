"""Run orchestration: reduced solve, dilated 3D solve or convergence study, plus manifest."""

from __future__ import annotations

import hashlib
import json
import logging
import platform
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .brinkman3d import (DilatedConfig, convergence_study, scaling_diagnostics, solve_dilated)
from .config import RunConfig
from .core import Grid2D, ScalarField2D, make_gap_field, sample_forcing
from .export import CellField3D, export_cell_csv, export_csv, export_structured_grid
from .numerics import ConvergenceError
from .reduced_flow import REYNOLDS_VARIANT, assemble_reynolds, solve_pressure, velocity_field
from .reduced_heat import BOUNDARY_VARIANT, V1_VARIANT, V2_VARIANT, temperature_field

log = logging.getLogger(__name__)

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2

FORMULA_VARIANTS = {
    "reynolds_mobility": REYNOLDS_VARIANT,
    "v1_constant": V1_VARIANT,
    "v2_signs": V2_VARIANT,
    "bottom_flux": BOUNDARY_VARIANT,
}
# short form for headers with a length limit
VARIANT_TAG = "porolux variants: c=(K/mu)(h-(2/M)tanh(Mh/2)); V1 const K/mu; V2 corrected signs; b-term unscaled"


def _dilated_config(cfg: RunConfig, eps: float) -> DilatedConfig:
    return DilatedConfig(epsilon=eps, params=cfg.params, forcing=cfg.forcing, nx=cfg.nx, ny=cfg.ny,
                         nz=cfg.nz, lx=cfg.lx, ly=cfg.ly, h=cfg.gap.value, tol=cfg.uzawa_tol,
                         maxit=cfg.uzawa_maxit, inner_tol=cfg.inner_tol, heat_tol=cfg.heat_tol)


def _run_reduced(cfg: RunConfig, out: Path, written: list, info: dict):
    grid = Grid2D(cfg.nx, cfg.ny, cfg.lx, cfg.ly)
    gap = make_gap_field(cfg.gap, grid)
    forcing = sample_forcing(cfg.forcing, grid)
    system = assemble_reynolds(grid, gap, cfg.params, forcing)
    c = ScalarField2D(grid, system.mobility)
    written.append(export_csv(c, out / "mobility.csv", names=["c"]))
    p, rep = solve_pressure(system, tol=cfg.tol, maxit=cfg.maxit, return_report=True)
    info["reynolds"] = {"iterations": rep.iterations, "residual": rep.residual}
    written.append(export_csv(p, out / "pressure.csv", names=["p"]))
    u = velocity_field(cfg.params, gap, p, forcing, nz=cfg.nz)
    written.append(export_csv(u, out / "velocity.csv", names=["u1", "u2", "u3"]))
    T = temperature_field(cfg.params, gap, p, forcing, nz=cfg.nz)
    written.append(export_csv(T, out / "temperature.csv", names=["T"]))


def _run_dilated(cfg: RunConfig, out: Path, written: list, info: dict):
    sol = solve_dilated(_dilated_config(cfg, cfg.epsilon))
    field = CellField3D(sol.config.spacing, {"Q": sol.Q, "T": sol.T}, {"U": sol.cell_velocity()})
    written.append(export_cell_csv(field, out / "dilated_fields.csv"))
    written.append(export_structured_grid(field, out / "dilated_fields.vtk", title=VARIANT_TAG))
    e = sol.energy
    row = {"eps": cfg.epsilon, "strain": e["strain"], "darcy": e["darcy"], "lhs": e["lhs"],
           "work": e["work"], "rel_error": e["rel_error"], "div_max": sol.div_max,
           "uzawa_iterations": sol.flow_report.iterations, "heat_iterations": sol.heat_report.iterations}
    written.append(export_csv([row], out / "energy_identity.csv"))
    info["energy_identity"] = row


def _run_converge(cfg: RunConfig, out: Path, written: list, info: dict):
    base = _dilated_config(cfg, cfg.eps_list[0])
    rows, sols = convergence_study(base, cfg.eps_list, return_solutions=True)
    written.append(export_csv(rows, out / "convergence.csv"))
    written.append(export_csv(scaling_diagnostics(sols), out / "scaling.csv"))
    info["energy_identity"] = [{"eps": e, "rel_error": s.energy["rel_error"], "div_max": s.div_max}
                               for e, s in sols.items()]


_MODES = {"reduced": _run_reduced, "dilated": _run_dilated, "converge": _run_converge}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(cfg: RunConfig, out_dir=None) -> int:
    """Execute ``cfg`` and write artifacts plus ``manifest.json``; returns an exit code."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    info: dict = {}
    status, error, code = "OK", None, EXIT_OK
    t0 = time.perf_counter()
    try:
        _MODES[cfg.mode](cfg, out, written, info)
    except ConvergenceError as exc:
        status, error, code = "FAILED", str(exc), EXIT_SOLVER
        log.error("solver failure: %s", exc)
    manifest = {
        "status": status,
        "error": error,
        "mode": cfg.mode,
        "config": cfg.text,
        "formula_variants": FORMULA_VARIANTS,
        "versions": {"porolux": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "artifacts": {p.name: _sha256(p) for p in written},
        "solver": info,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "wall_time_s": time.perf_counter() - t0,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=float) + "\n",
                                       encoding="utf-8")
    log.info("%s run %s: %d artifacts in %s", cfg.mode, status, len(written), out)
    return code
