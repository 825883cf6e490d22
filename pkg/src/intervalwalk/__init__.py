"""Expectation bounds for random walks on graphs with interval edge weights.

Symmetric edge weights vary per time step inside given intervals while every
state keeps a fixed total incident weight; the package computes lower and
upper bounds of n-step expectations over all such walks via local descent on
per-step endpoint choices, multistart search, and an exact enumeration oracle
for small instances.
"""

from .chain import (
    Schedule,
    backward_step,
    detailed_balance_residual,
    expectation,
    forward_step,
    is_pmf,
    sequence_lower_probability,
    stationary_distribution,
    transition_matrix,
)
from .generate import GenerationError, GenParams, generate_instance
from .graph import (
    TOL,
    EdgeChoice,
    EdgeSelection,
    IntervalBounds,
    StateSpace,
    ValidationReport,
    Violation,
    ViolationCode,
    WeightFunction,
    close,
    connected_components,
    edge_gradient,
    one_step_minimizer,
    selection_of,
    validate,
    weight_from_selection,
    weight_matrix_from_mask,
)
from .instancefile import ProblemInstance, load_instance, save_instance
from .optimize import (
    LocalOptimum,
    MultistartReport,
    OptimizationProblem,
    Sense,
    SweepOrder,
    improve_at,
    local_optimize,
    multistart,
    multistart_exhaustive,
    random_extremal_schedule,
)
from .oracle import BudgetExceededError, ExactBounds, enumerate_extremal, exact_bounds

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "EdgeChoice",
    "EdgeSelection",
    "ExactBounds",
    "GenParams",
    "GenerationError",
    "IntervalBounds",
    "LocalOptimum",
    "MultistartReport",
    "OptimizationProblem",
    "ProblemInstance",
    "Schedule",
    "Sense",
    "StateSpace",
    "SweepOrder",
    "TOL",
    "ValidationReport",
    "Violation",
    "ViolationCode",
    "WeightFunction",
    "backward_step",
    "close",
    "connected_components",
    "detailed_balance_residual",
    "edge_gradient",
    "enumerate_extremal",
    "exact_bounds",
    "expectation",
    "forward_step",
    "generate_instance",
    "improve_at",
    "is_pmf",
    "load_instance",
    "local_optimize",
    "multistart",
    "multistart_exhaustive",
    "one_step_minimizer",
    "random_extremal_schedule",
    "save_instance",
    "selection_of",
    "sequence_lower_probability",
    "stationary_distribution",
    "transition_matrix",
    "validate",
    "weight_from_selection",
    "weight_matrix_from_mask",
]
