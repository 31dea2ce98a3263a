"""Thin-film Darcy-Brinkman flow with viscous dissipation and a bottom heat flux.

``reduced_flow`` and ``reduced_heat`` evaluate the thin-film limit model
(closed-form column profiles and a 2D Reynolds pressure solve);
``brinkman3d`` solves the dilated 3D system on a box to check convergence
towards that limit.
"""

__version__ = "0.1.0"

from .core import (ConstantForcing, ConstantGap, GapField, GradientForcing, Grid2D, ParabolicGap,  # noqa: E402
                   ParameterError, PhysicalParams, ScalarField2D, SinusoidalForcing, SinusoidalGap,
                   VectorField2D, ZeroForcing, make_gap_field, make_params, sample_forcing)
from .numerics import ConvergenceError  # noqa: E402
from .reduced_flow import (assemble_reynolds, column_flux, eval_profile, mobility_coefficient,  # noqa: E402
                           profile_coeffs, solve_pressure, velocity_field)
from .reduced_heat import (column_ode_oracle, make_temperature_profile, temperature_field,  # noqa: E402
                           temperature_profile)
