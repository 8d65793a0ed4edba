"""Protocol definitions for the copula-QAOA toolkit.

These protocols fix the contracts shared between layers: classical knapsack
solvers plugged into the unit-commitment scan, and quantum registers the
circuit builders write gates into (a statevector or a gate recorder).
"""

from __future__ import annotations

from typing import Callable, Protocol, Tuple

from copula_qaoa.domain.entities import KnapsackInstance, SolveResult

# Black-box objective over (gamma, beta), maximized by the trainers
Objective2D = Callable[[float, float], float]
Interval = Tuple[float, float]


class KnapsackSolver(Protocol):
    """Protocol for knapsack solvers, classical or sampled from a circuit."""

    @property
    def name(self) -> str:
        """Return the solver name."""
        ...

    @property
    def thread_safe(self) -> bool:
        """Whether ``solve`` may be invoked concurrently."""
        ...

    def solve(self, instance: KnapsackInstance) -> SolveResult:
        """Solve ``instance`` and return a feasible selection.

        Args:
        ----
            instance: The knapsack instance

        Returns:
        -------
            Solver result; value and weight recomputable from the selection

        """
        ...


class QuantumRegister(Protocol):
    """Protocol for targets the circuit builders apply gates to."""

    @property
    def n_qubits(self) -> int:
        """Return the number of qubits."""
        ...

    def apply_ry(self, qubit: int, angle: float) -> None:
        """Apply exp(-i*angle*Y/2) to ``qubit``."""
        ...

    def apply_rz(self, qubit: int, angle: float) -> None:
        """Apply exp(-i*angle*Z/2) to ``qubit``."""
        ...

    def apply_controlled_ry(
        self, control: int, target: int, angle: float, control_value: int = 1
    ) -> None:
        """Apply RY(angle) to ``target`` where ``control`` equals ``control_value``."""
        ...

    def apply_phase_z(self, qubit: int, angle: float) -> None:
        """Apply exp(-i*angle*Z) to ``qubit``."""
        ...
