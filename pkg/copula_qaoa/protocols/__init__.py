"""Protocol definitions for the copula-QAOA toolkit."""

from copula_qaoa.protocols.interfaces import (
    Interval,
    KnapsackSolver,
    Objective2D,
    QuantumRegister,
)

__all__ = [
    "Interval",
    "KnapsackSolver",
    "Objective2D",
    "QuantumRegister",
]
