# Dilated 3D solves approach the limit model as eps -> 0.
# Run: python demos/eps_convergence.py   (about 15 s)
import logging

from porolux.brinkman3d import DilatedConfig, convergence_study, scaling_diagnostics
from porolux.core import SinusoidalForcing, make_params

logging.basicConfig(level=logging.INFO, format="%(message)s")

base = DilatedConfig(
    epsilon=0.25,
    params=make_params(1, 1, 1, 1, b=1.0),
    forcing=SinusoidalForcing(1, 0, 0, 1),  # f' = (sin(pi y), 0)
    nx=32, ny=32, nz=16, h=1.0,
)
rows, sols = convergence_study(base, [1 / 4, 1 / 8, 1 / 16], return_solutions=True)

print("\nerrors against the limit model")
print(f"{'eps':>8} {'|U-u*|':>11} {'|U3|':>11} {'|Q-p*|':>11} {'|T-T*|_4/3':>11}")
for r in rows:
    print(f"{r['eps']:8.4f} {r['u_err_L2']:11.3e} {r['u3_L2']:11.3e} {r['q_err_L2']:11.3e} {r['T_err_L43']:11.3e}")

print("\na priori quantities (bounded in eps)")
for r in scaling_diagnostics(sols):
    print(f"eps={r['eps']:.4f}  |U|={r['U_L2']:.4f}  eps|DU|={r['eps_DU_L2']:.4f} "
          f"(vertical share {r['vertical_fraction']:.2f})  |T|={r['T_L43']:.4f}  eps|grad T|={r['eps_gradT_L43']:.4f}")

for eps, s in sols.items():
    print(f"eps={eps:g}: energy identity rel. error {s.energy['rel_error']:.1e}, max|div U| {s.div_max:.1e}")
