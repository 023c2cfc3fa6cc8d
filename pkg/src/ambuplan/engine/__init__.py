"""Exact LP and MILP solving used by the planning models.

The public surface is small: build a LinearProgram, then call solve_lp for
the continuous relaxation or solve_milp to enforce integrality flags.
"""

from .branch_bound import solve_milp
from .program import (
    EngineError,
    LinearProgram,
    LinearRow,
    LpSolution,
    LpStatus,
    MilpOptions,
    MilpSolution,
    MilpStatus,
    NumericalBreakdownError,
    UnboundedProgramError,
)
from .simplex import FEAS_TOL, INTEGRALITY_TOL, PIVOT_TOL, solve_lp

__all__ = [
    "EngineError",
    "FEAS_TOL",
    "INTEGRALITY_TOL",
    "PIVOT_TOL",
    "LinearProgram",
    "LinearRow",
    "LpSolution",
    "LpStatus",
    "MilpOptions",
    "MilpSolution",
    "MilpStatus",
    "NumericalBreakdownError",
    "UnboundedProgramError",
    "solve_lp",
    "solve_milp",
]
