"""Interior-point solver for programs over free, orthant and exponential cones."""

from .ipm import (
    DUAL_INFEASIBLE,
    ILL_POSED,
    ITER_LIMIT,
    OPTIMAL,
    PRIMAL_INFEASIBLE,
    Solution,
    SolverOptions,
    residuals,
    solve,
)
from .model import Model
from .program import ConeProgram, ProgramError, loads

__all__ = [
    "ConeProgram",
    "Model",
    "ProgramError",
    "Solution",
    "SolverOptions",
    "loads",
    "residuals",
    "solve",
    "OPTIMAL",
    "PRIMAL_INFEASIBLE",
    "DUAL_INFEASIBLE",
    "ILL_POSED",
    "ITER_LIMIT",
]
