"""gaugelab: generalized gauge functions with nonlocal field terms."""

from ._kernels import BACKEND
from .analysis import (PhaseReport, ResidualReport, WavefunctionSample, difference_on_grid,
                       enclosed_flux, pde_residual, phase_map, solution_difference,
                       van_kampen_delta, werner_brill_cancellation)
from .fields import (SCENARIOS, Constants, FieldSet, Multiplicities, PotentialSet, ScenarioConfig,
                     builtin_config, derive_fields, faraday_residual)
from .gauge_solver import (FixingError, FixingFunctions, GaugeSolution, apply_multiplicity,
                           lambda_1d, lambda_2d_static, lambda_full, naive_dirac_lambda, solve,
                           solve_fixing_1d, solve_fixing_2d, solve_fixing_full)
from .numerics import BoxDomain, Interval, central_diff, integrate_iterated, integrate_line
from .semiclassical import SlitSetup, trajectory_oracle

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoxDomain", "Constants", "FieldSet", "FixingError", "FixingFunctions",
    "GaugeSolution", "Interval", "Multiplicities", "PhaseReport", "PotentialSet",
    "ResidualReport", "SCENARIOS", "ScenarioConfig", "SlitSetup", "WavefunctionSample",
    "apply_multiplicity", "builtin_config", "central_diff", "derive_fields",
    "difference_on_grid", "enclosed_flux", "faraday_residual", "integrate_iterated",
    "integrate_line", "lambda_1d", "lambda_2d_static", "lambda_full", "naive_dirac_lambda",
    "pde_residual", "phase_map", "solution_difference", "solve", "solve_fixing_1d",
    "solve_fixing_2d", "solve_fixing_full", "trajectory_oracle", "van_kampen_delta",
    "werner_brill_cancellation",
]
