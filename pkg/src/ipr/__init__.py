"""Primal-dual interior-point relaxation solver for smooth nonlinear programs."""
from .problems import ProblemSpec, registry
from .solver import SolveReport, SolverConfig, Status, solve

__version__ = "0.1.0"

__all__ = ["ProblemSpec", "SolveReport", "SolverConfig", "Status", "registry", "solve"]
