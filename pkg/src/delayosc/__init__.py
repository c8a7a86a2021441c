"""Linear oscillator with pure delay: x''(t) - omega^2 x(t - 2 tau) = f(t) in R^n.

Solutions are built from the delayed matrix exponential and checked
against a method-of-steps integrator.  The ``analysis`` module compares
them with the no-delay oscillator as the delay shrinks.
"""
from .analysis import (
    BoundsConstants,
    CheckRow,
    ConvergenceRow,
    ConvergenceTable,
    bounds_constants,
    corollary_check,
    fit_slope,
    lemma_check,
    linear_history,
    solution_convergence_study,
)
from .classical import ClassicalProblem, classical_solution, classical_velocity
from .config import ScenarioConfig, dump_config, load_config, parse_config
from .dexp import (
    DelayedExpEvaluator,
    FundamentalPair,
    delayed_exp,
    delayed_exp_derivative,
    fundamental_x1,
    fundamental_x2,
)
from .errors import *  # noqa: F401,F403
from .functions import ForcingFunction, HistoryFunction
from .linalg import Operator, QuadratureRule, integrate, inverse, matrix_exp, operator_norm
from .solver import (
    DelayProblem,
    Trajectory,
    solve,
    solve_classical,
    solve_forced_zero_ic,
    solve_homogeneous,
    solve_mild,
)
from .steps import AprioriReport, SegmentSolution, StepTrajectory, apriori_check, integrate_segments, kappa

__version__ = "0.1.0"
