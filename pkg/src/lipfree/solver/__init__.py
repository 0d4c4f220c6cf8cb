"""Optimisation kernels shared by the free-space, extension and ball modules."""

from .convex import EmptyEvidence, Feasible, Indeterminate, MinimaxResult, euclidean_feasibility, minimax, minmax_ball
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LPOutcome, farkas_value, primal_residual, solve_lp

__all__ = [
    "EmptyEvidence", "Feasible", "INFEASIBLE", "Indeterminate", "LPOutcome", "LinearProgram", "MinimaxResult",
    "OPTIMAL", "UNBOUNDED", "euclidean_feasibility", "farkas_value", "minimax", "minmax_ball",
    "primal_residual", "solve_lp",
]
