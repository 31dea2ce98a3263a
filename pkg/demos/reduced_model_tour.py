# Thin-film limit model on a parabolic gap: mobility, pressure, column profiles.
# Run: python demos/reduced_model_tour.py
import numpy as np

from porolux.core import Grid2D, ParabolicGap, SinusoidalForcing, make_gap_field, make_params, sample_forcing
from porolux.reduced_flow import (assemble_reynolds, column_flux, eval_profile, mobility_coefficient,
                                  profile_coeffs, solve_pressure, velocity_field)
from porolux.reduced_heat import temperature_field

params = make_params(mu=1.0, mu_eff=1.0, K=1.0, k=1.0, b=0.5)

# %% the mobility interpolates between Poiseuille (thin) and Darcy (thick)
for h in (1e-3, 1e-1, 1.0, 10.0, 100.0):
    c = mobility_coefficient(params, h)
    print(f"h={h:8g}  c={c:.6e}  c/(h^3/12)={c / (h ** 3 / 12):.6f}  c/((K/mu) h)={c / h:.6f}")
print("flux and mobility agree:", column_flux(params, 1.0), mobility_coefficient(params, 1.0))

# %% one column: the profile is zero at both walls and symmetric
co = profile_coeffs(params, 1.0)
z = np.linspace(0, 1, 9)
print("P(z) =", np.round(eval_profile(co, z), 6))

# %% Reynolds pressure on a 48x48 grid
grid = Grid2D(48, 48)
gap = make_gap_field(ParabolicGap(a=0.8, b0=0.6), grid)
forcing = sample_forcing(SinusoidalForcing(1, 0, 0, 1), grid)
system = assemble_reynolds(grid, gap, params, forcing)
p, rep = solve_pressure(system, return_report=True)
print(f"CG: {rep.iterations} iterations, residual {rep.residual:.2e}, p in [{p.values.min():.4f}, {p.values.max():.4f}]")

# %% velocity and temperature columns
u = velocity_field(params, gap, p, forcing, nz=32)
T = temperature_field(params, gap, p, forcing, nz=32)
i, j = 24, 12
print("column", (i, j), "h =", gap.values[i, j])
print("  max |u'| =", np.abs(u.values[:2, i, j]).max())
print("  T(0), T(h) =", T.values[0, i, j, 0], T.values[0, i, j, -1])
print("  min T over the field:", T.values.min())
