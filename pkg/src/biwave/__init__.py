"""Exact solutions of the n-dimensional biwave Cauchy problem

    (d_tt - a^2 Lap)(d_tt - b^2 Lap) u = f,   a^2 > b^2 > 0,

with Cauchy data u, u_t, u_tt, u_ttt = phi0..phi3 at t = 0.
"""

from .duhamel import DuhamelConfig, solve_nonhomogeneous
from .elastokit import (ElasticParams, VectorFieldEvaluator, cks_displacement, lame_to_speeds,
                        navier_residual)
from .fields import (BiwaveParams, ClosureField, ClosureForcing, EvalGrid, FieldError, ForcingField,
                     Gaussian, InitialData, ParamError, ScalarField, SolutionEvaluator, TrigForcing,
                     TrigPoly, ZeroField, eval_field, make_params)
from .oracle import (ModeCoefficients, forced_mode_solution, forced_oracle_solution,
                     mode_coefficients, oracle_solution, zero_mode)
from .quadrature import (QuadratureRule, gauss_legendre, integrate_interval, integrate_nested,
                         sphere_surface_rule, weighted_ball_rule)
from .scenario import Scenario, ScenarioError, parse_scenario, serialize_scenario
from .solvers import SolverConfig, solve, solve_1d, solve_even, solve_odd
from .spherical import modified_spherical_mean, radial_derivative_power, spherical_mean, time_derivative
from .verification import ResidualReport, biwave_residual, compare, initial_probe

__version__ = "0.1.0"
