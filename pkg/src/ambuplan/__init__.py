"""Multi-period ambulance fleet planning over a coverage network.

The package builds two integer programming models for positioning a fleet of
emergency vehicles across candidate stations over the slots of a planning
day, solves them with its own exact LP/MILP engine, and ships a seeded
instance generator, a brute-force reference solver for small cases, and a
command line front end.
"""

from .allocation import build_allocation_program, solve_allocation
from .core import (
    AllocationPlan,
    Instance,
    SolveOutcome,
    SolveStatus,
    TransferPlan,
    Violation,
    evaluate_allocation,
    evaluate_transfer,
    validate_instance,
)
from .generator import GenParams, generate, preset, tiny_params
from .oracle import SearchSpaceError, brute_force_allocation, brute_force_transfer
from .transfer import build_transfer_program, solve_transfer

__all__ = [
    "AllocationPlan",
    "GenParams",
    "Instance",
    "SearchSpaceError",
    "SolveOutcome",
    "SolveStatus",
    "TransferPlan",
    "Violation",
    "brute_force_allocation",
    "brute_force_transfer",
    "build_allocation_program",
    "build_transfer_program",
    "evaluate_allocation",
    "evaluate_transfer",
    "generate",
    "preset",
    "solve_allocation",
    "solve_transfer",
    "tiny_params",
    "validate_instance",
]

__version__ = "1.0.0"
