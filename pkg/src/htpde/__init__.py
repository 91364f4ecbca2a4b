"""Numerical laboratory for a diffusive Holling-Tanner predator-prey system.

The package studies the coupled reaction-diffusion pair

    u_t = d1(x) lap(u) + u (a(x) - u - b v / (1 + r u))
    v_t = d2(x) lap(v) + mu v (1 - v / u)

on a rectangular domain with no-flux boundary conditions, where the prey
carrying capacity a(x) and the diffusivities d1(x), d2(x) may vary in space.
It provides attractor-box computations, explicit time stepping with a
compiled core, steady-state solvers, and Lyapunov-functional monitoring.
"""

from .backend import BACKEND
from .bounds import (BoundQuadruple, IterateTrace, check_b_condition,
                     check_global_stability, check_ratio_condition, default_eps1,
                     h_eval, h_prime, homogeneous_steady, lipschitz_K,
                     monotone_iteration, quadruple_closed_r0,
                     quadruple_residuals, solve_quadruple)
from .errors import (ConvergenceError, HypothesisError, NewtonFallback,
                     PositivityError, ValidationError)
from .lyapunov import (DiscriminantReport, LyapunovConfig, MonitorReport,
                       discriminant_margin,
                       eta_default, green_inequality_check, lyapunov_value,
                       monitor_decrease)
from .model import (CoefficientSpec, Grid, KineticParams, ModelSpec,
                    ScalarField, State, build_coefficient, coeff_extremes,
                    eval_f, eval_g)
from .pde import (SimulationTrace, StepperConfig, box_entry_time, cfl_limit,
                  export_snapshots, export_trace_csv, laplacian_neumann, rhs,
                  simulate, step, write_field_csv)
from .steady import (SteadyResult, check_containment, default_initial,
                     residual_sup, steady_by_relaxation, steady_newton_1d)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundQuadruple",
    "CoefficientSpec",
    "ConvergenceError",
    "DiscriminantReport",
    "Grid",
    "HypothesisError",
    "IterateTrace",
    "KineticParams",
    "ModelSpec",
    "MonitorReport",
    "NewtonFallback",
    "PositivityError",
    "ScalarField",
    "SimulationTrace",
    "State",
    "SteadyResult",
    "StepperConfig",
    "ValidationError",
    "box_entry_time",
    "build_coefficient",
    "cfl_limit",
    "check_b_condition",
    "check_containment",
    "check_global_stability",
    "check_ratio_condition",
    "coeff_extremes",
    "default_eps1",
    "default_initial",
    "discriminant_margin",
    "eta_default",
    "eval_f",
    "eval_g",
    "export_snapshots",
    "export_trace_csv",
    "green_inequality_check",
    "h_eval",
    "h_prime",
    "homogeneous_steady",
    "laplacian_neumann",
    "lipschitz_K",
    "LyapunovConfig",
    "lyapunov_value",
    "monitor_decrease",
    "monotone_iteration",
    "quadruple_closed_r0",
    "quadruple_residuals",
    "residual_sup",
    "rhs",
    "simulate",
    "solve_quadruple",
    "steady_by_relaxation",
    "steady_newton_1d",
    "step",
    "write_field_csv",
    "__version__",
]
