"""Infrastructure implementations for the copula-QAOA toolkit."""

from copula_qaoa.infrastructure.solvers import (
    BranchAndBoundSolver,
    BruteForceSolver,
    DynamicProgrammingSolver,
    LazyGreedySolver,
    get_default_solvers,
)
from copula_qaoa.infrastructure.statevector import GateRecorder, StateVector

__all__ = [
    # Solvers
    "BranchAndBoundSolver",
    "BruteForceSolver",
    "DynamicProgrammingSolver",
    "LazyGreedySolver",
    "get_default_solvers",
    # Simulation
    "GateRecorder",
    "StateVector",
]
