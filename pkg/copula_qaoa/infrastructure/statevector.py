"""Dense statevector simulator with the gate set copula-QAOA needs.

Amplitudes are stored little-endian: bit ``q`` of a basis index is qubit
``q``. Viewed as a ``[2] * n`` tensor in C order, qubit ``q`` is axis
``n - 1 - q``. Gates are applied in place by slicing that tensor view.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from copula_qaoa.domain.entities import SampleSet
from copula_qaoa.domain.errors import InvalidArgumentError, ResourceLimitError
from copula_qaoa.protocols.interfaces import QuantumRegister

logger = logging.getLogger(__name__)

MAX_QUBITS = 22


def index_to_bitstring(index: int, n: int) -> str:
    """Render a little-endian basis index qubit-0-first."""
    return format(index, f"0{n}b")[::-1]


def bitstring_to_index(bitstring: str) -> int:
    """Inverse of :func:`index_to_bitstring`."""
    return int(bitstring[::-1], 2)


class StateVector(QuantumRegister):
    """Single-owner mutable n-qubit state.

    Attributes
    ----------
        amplitudes: Complex amplitudes of length 2**n

    """

    def __init__(self, n: int, max_qubits: int = MAX_QUBITS):
        """Create |0...0> on ``n`` qubits.

        Raises
        ------
            ResourceLimitError: If ``n`` exceeds ``max_qubits``

        """
        if n < 1:
            raise InvalidArgumentError(f"need at least one qubit, got {n}")
        if n > max_qubits:
            raise ResourceLimitError(f"{n} qubits exceeds the simulator cap of {max_qubits}")
        self._n = n
        self.max_qubits = max_qubits
        self.amplitudes = np.zeros(1 << n, dtype=np.complex128)
        self.amplitudes[0] = 1.0

    @classmethod
    def product_state(cls, probs: Sequence[float], max_qubits: int = MAX_QUBITS) -> StateVector:
        """Prepare the product state with qubit ``i`` equal to sqrt(1-p_i)|0> + sqrt(p_i)|1>."""
        probs = [float(p) for p in probs]
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise InvalidArgumentError("product-state probabilities must lie in [0, 1]")
        state = cls(len(probs), max_qubits)
        vector = np.ones(1, dtype=np.complex128)
        for p in reversed(probs):
            vector = np.kron(vector, np.array([math.sqrt(1.0 - p), math.sqrt(p)]))
        state.amplitudes = vector.astype(np.complex128)
        return state

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray, max_qubits: int = MAX_QUBITS) -> StateVector:
        """Wrap a copy of an explicit amplitude vector of length 2**n."""
        size = len(amplitudes)
        n = size.bit_length() - 1
        if size < 2 or 1 << n != size:
            raise InvalidArgumentError(f"amplitude vector length {size} is not a power of two")
        state = cls(n, max_qubits)
        state.amplitudes = np.array(amplitudes, dtype=np.complex128)
        return state

    @property
    def n_qubits(self) -> int:
        """Return the number of qubits."""
        return self._n

    def copy(self) -> StateVector:
        """Return an independent copy."""
        clone = StateVector(self._n, self.max_qubits)
        clone.amplitudes = self.amplitudes.copy()
        return clone

    def _check(self, *qubits: int) -> None:
        for q in qubits:
            if not 0 <= q < self._n:
                raise InvalidArgumentError(f"qubit {q} out of range for {self._n} qubits")
        if len(set(qubits)) != len(qubits):
            raise InvalidArgumentError(f"qubits must be distinct, got {qubits}")

    def _idx(self, fixed: Dict[int, int]) -> Tuple[Any, ...]:
        """Tensor index fixing the bit of each qubit in ``fixed``."""
        index: List[Any] = [slice(None)] * self._n
        for qubit, bit in fixed.items():
            index[self._n - 1 - qubit] = bit
        return tuple(index)

    def _rotate(
        self, target: int, c: float, s: float, control: Optional[Tuple[int, int]] = None
    ) -> None:
        tensor = self.amplitudes.reshape([2] * self._n)
        fixed = dict([control]) if control is not None else {}
        zero = self._idx({**fixed, target: 0})
        one = self._idx({**fixed, target: 1})
        a0 = tensor[zero].copy()
        a1 = tensor[one].copy()
        tensor[zero] = c * a0 - s * a1
        tensor[one] = s * a0 + c * a1

    def _diagonal(self, qubit: int, phase0: complex, phase1: complex) -> None:
        tensor = self.amplitudes.reshape([2] * self._n)
        tensor[self._idx({qubit: 0})] *= phase0
        tensor[self._idx({qubit: 1})] *= phase1

    def apply_ry(self, qubit: int, angle: float) -> None:
        """Apply exp(-i*angle*Y/2) to ``qubit``."""
        self._check(qubit)
        self._rotate(qubit, math.cos(angle / 2), math.sin(angle / 2))

    def apply_rz(self, qubit: int, angle: float) -> None:
        """Apply exp(-i*angle*Z/2) to ``qubit``."""
        self._check(qubit)
        self._diagonal(qubit, np.exp(-0.5j * angle), np.exp(0.5j * angle))

    def apply_controlled_ry(
        self, control: int, target: int, angle: float, control_value: int = 1
    ) -> None:
        """Apply RY(angle) to ``target`` where ``control`` equals ``control_value``."""
        self._check(control, target)
        if control_value not in (0, 1):
            raise InvalidArgumentError(f"control_value must be 0 or 1, got {control_value}")
        self._rotate(target, math.cos(angle / 2), math.sin(angle / 2), (control, control_value))

    def apply_phase_z(self, qubit: int, angle: float) -> None:
        """Apply exp(-i*angle*Z): e^{-i*angle} on bit 0, e^{+i*angle} on bit 1."""
        self._check(qubit)
        self._diagonal(qubit, np.exp(-1j * angle), np.exp(1j * angle))

    def norm(self) -> float:
        """Return the squared norm, 1 for a valid state."""
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        """Return |amplitude|^2 for every basis index."""
        return np.abs(self.amplitudes) ** 2

    def distribution(self, floor: float = 0.0) -> Dict[str, float]:
        """Map qubit-0-first bitstrings to probabilities.

        Args:
        ----
            floor: Entries with probability at or below ``floor`` are dropped
                when ``floor`` is positive

        Returns:
        -------
            Probability per bitstring, ordered by basis index

        """
        if self._n > MAX_QUBITS:
            raise ResourceLimitError(f"distribution() is capped at {MAX_QUBITS} qubits")
        probs = self.probabilities()
        keep = np.flatnonzero(probs > floor) if floor > 0 else np.arange(len(probs))
        return {index_to_bitstring(int(i), self._n): float(probs[i]) for i in keep}

    def sample(self, shots: int, seed: Optional[int] = None) -> SampleSet:
        """Draw ``shots`` i.i.d. measurements by inverse CDF.

        Args:
        ----
            shots: Number of measurements, at least 1
            seed: Seed of the numpy generator; equal seeds give equal samples

        Returns:
        -------
            Counts per qubit-0-first bitstring

        """
        if shots < 1:
            raise InvalidArgumentError(f"shots must be >= 1, got {shots}")
        cdf = np.cumsum(self.probabilities())
        cdf /= cdf[-1]
        rng = np.random.default_rng(seed)
        draws = np.searchsorted(cdf, rng.random(shots), side="right")
        draws = np.minimum(draws, len(cdf) - 1)
        indices, counts = np.unique(draws, return_counts=True)
        return SampleSet(
            {index_to_bitstring(int(i), self._n): int(c) for i, c in zip(indices, counts)},
            shots,
        )


class GateRecorder(QuantumRegister):
    """Register that records gates instead of simulating them.

    Running a circuit builder against a recorder yields the JSON gate list
    ``{gate, qubits, angle}`` used for debugging exports.
    """

    def __init__(self, n: int):
        """Create an empty recording over ``n`` qubits."""
        self._n = n
        self.gates: List[Dict[str, Any]] = []

    @property
    def n_qubits(self) -> int:
        """Return the number of qubits."""
        return self._n

    def _record(self, gate: str, qubits: Sequence[int], angle: float) -> None:
        self.gates.append({"gate": gate, "qubits": list(qubits), "angle": float(angle)})

    def apply_ry(self, qubit: int, angle: float) -> None:
        """Record an RY gate."""
        self._record("ry", [qubit], angle)

    def apply_rz(self, qubit: int, angle: float) -> None:
        """Record an RZ gate."""
        self._record("rz", [qubit], angle)

    def apply_controlled_ry(
        self, control: int, target: int, angle: float, control_value: int = 1
    ) -> None:
        """Record a controlled RY; control on |0> is named ``c0ry``."""
        self._record("cry" if control_value == 1 else "c0ry", [control, target], angle)

    def apply_phase_z(self, qubit: int, angle: float) -> None:
        """Record a Z-phase gate."""
        self._record("phase_z", [qubit], angle)


def sample_uniform(n: int, shots: int, seed: Optional[int] = None) -> SampleSet:
    """Uniformly random bitstrings, the random-sampler baseline."""
    if n < 1 or shots < 1:
        raise InvalidArgumentError("n and shots must be >= 1")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(shots, n), dtype=np.int8)
    rows, counts = np.unique(bits, axis=0, return_counts=True)
    return SampleSet(
        {"".join(str(b) for b in row): int(c) for row, c in zip(rows.tolist(), counts)}, shots
    )
