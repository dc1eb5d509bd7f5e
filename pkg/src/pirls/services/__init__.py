"""
Services module for pirls.
Contains file-level orchestration: solving, verifying, generating and sweeping.
"""
from .solve_service import SolveService, solve_service
from .sweep_service import SweepService, sweep_service

__all__ = [
    "SolveService",
    "solve_service",
    "SweepService",
    "sweep_service",
]
