"""Copula-QAOA circuit family.

Builds the warm-started variational state: a biased product state, then
``p`` layers of the diagonal cost unitary exp(-i*gamma*sum_i v_i Z_i)
followed by the copula mixer exp(-i*beta*H_cop) on every coupled pair.
Builders write into any QuantumRegister, so the same code drives the
statevector simulator and the gate-list export.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from copula_qaoa.domain.entities import (
    CopulaSpec,
    KnapsackInstance,
    PairingScheme,
    QaoaParams,
    SampleSet,
    Selection,
)
from copula_qaoa.domain.errors import InvalidArgumentError
from copula_qaoa.infrastructure.solvers import smoothed_probabilities, subset_sums
from copula_qaoa.infrastructure.statevector import MAX_QUBITS, GateRecorder, StateVector
from copula_qaoa.protocols.interfaces import QuantumRegister

logger = logging.getLogger(__name__)


def _check_probability(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {p}")


def ry_angle(p: float) -> float:
    """Angle 2*asin(sqrt(p)) that rotates |0> to sqrt(1-p)|0> + sqrt(p)|1>."""
    return 2.0 * math.asin(math.sqrt(min(max(p, 0.0), 1.0)))


def copula_pmf(p1: float, p2: float, theta: float = -1.0) -> Tuple[float, float, float, float]:
    """Joint distribution of two bits with marginals p1, p2 and correlation theta.

    Returns
    -------
        Probabilities ``(q00, q01, q10, q11)`` where the first index is bit 1

    """
    _check_probability("p1", p1)
    _check_probability("p2", p2)
    if not -1.0 <= theta <= 1.0:
        raise InvalidArgumentError(f"theta must lie in [-1, 1], got {theta}")
    t = theta * p1 * p2 * (1.0 - p1) * (1.0 - p2)
    return (
        (1.0 - p1) * (1.0 - p2) + t,
        (1.0 - p1) * p2 - t,
        p1 * (1.0 - p2) - t,
        p1 * p2 + t,
    )


def conditionals(p_i: float, p_j: float, theta: float = -1.0) -> Tuple[float, float]:
    """Return ``(P(x_j=1 | x_i=1), P(x_j=1 | x_i=0))`` under the copula."""
    if theta == -1.0:
        return (
            p_j * (1.0 - (1.0 - p_i) * (1.0 - p_j)),
            p_j * (1.0 + p_i * (1.0 - p_j)),
        )
    _, q01, _, q11 = copula_pmf(p_i, p_j, theta)
    given_one = q11 / p_i if p_i > 0 else p_j
    given_zero = q01 / (1.0 - p_i) if p_i < 1 else p_j
    return given_one, given_zero


def _rcop_angles(p_i: float, p_j: float, theta: float) -> Tuple[float, float, float]:
    _check_probability("p_i", p_i)
    _check_probability("p_j", p_j)
    given_one, given_zero = conditionals(p_i, p_j, theta)
    return ry_angle(p_i), ry_angle(given_one), ry_angle(given_zero)


def apply_rcop(
    register: QuantumRegister, qi: int, qj: int, p_i: float, p_j: float, theta: float = -1.0
) -> None:
    """Apply R_cop: RY on qi, then RY on qj controlled on qi=1 and on qi=0.

    Acting on |00> of the pair it prepares amplitudes sqrt(copula_pmf).
    """
    if qi == qj:
        raise InvalidArgumentError(f"R_cop needs two distinct qubits, got {qi} twice")
    a_i, a_one, a_zero = _rcop_angles(p_i, p_j, theta)
    register.apply_ry(qi, a_i)
    register.apply_controlled_ry(qi, qj, a_one, control_value=1)
    register.apply_controlled_ry(qi, qj, a_zero, control_value=0)


def apply_rcop_dagger(
    register: QuantumRegister, qi: int, qj: int, p_i: float, p_j: float, theta: float = -1.0
) -> None:
    """Apply the inverse of :func:`apply_rcop`."""
    if qi == qj:
        raise InvalidArgumentError(f"R_cop needs two distinct qubits, got {qi} twice")
    a_i, a_one, a_zero = _rcop_angles(p_i, p_j, theta)
    register.apply_controlled_ry(qi, qj, -a_zero, control_value=0)
    register.apply_controlled_ry(qi, qj, -a_one, control_value=1)
    register.apply_ry(qi, -a_i)


def apply_copula_mixer(
    register: QuantumRegister, beta: float, spec: CopulaSpec, pairing: PairingScheme
) -> None:
    """Apply exp(-i*beta*H_cop) pair by pair, sublayer by sublayer.

    Each pair gets R_cop . (RZ(2*beta) x RZ(2*beta)) . R_cop^dagger, which
    equals exp(-i*beta*R_cop (Z_i + Z_j) R_cop^dagger) up to global phase.
    """
    if spec.n != register.n_qubits:
        raise InvalidArgumentError(
            f"copula spec has {spec.n} marginals for {register.n_qubits} qubits"
        )
    pairing.validate(register.n_qubits)
    if beta == 0:
        return
    for i, j in pairing.pairs:
        p_i, p_j = spec.probs[i], spec.probs[j]
        apply_rcop_dagger(register, i, j, p_i, p_j, spec.theta)
        register.apply_rz(i, 2.0 * beta)
        register.apply_rz(j, 2.0 * beta)
        apply_rcop(register, i, j, p_i, p_j, spec.theta)


def apply_cost_layer(register: QuantumRegister, gamma: float, values: Sequence[float]) -> None:
    """Apply exp(-i*gamma*sum_i v_i Z_i) as one Z-phase per qubit."""
    if len(values) != register.n_qubits:
        raise InvalidArgumentError(
            f"{len(values)} cost coefficients for {register.n_qubits} qubits"
        )
    if gamma == 0:
        return
    for qubit, value in enumerate(values):
        register.apply_phase_z(qubit, gamma * value)


def _check_dimensions(instance: KnapsackInstance, spec: CopulaSpec, pairing: PairingScheme) -> None:
    if spec.n != instance.n:
        raise InvalidArgumentError(
            f"copula spec has {spec.n} marginals but the instance has {instance.n} items"
        )
    pairing.validate(instance.n)


def _prepare_paired(register: QuantumRegister, spec: CopulaSpec, pairing: PairingScheme) -> None:
    first = pairing.sublayers[0] if pairing.sublayers else ()
    covered = set()
    for i, j in first:
        apply_rcop(register, i, j, spec.probs[i], spec.probs[j], spec.theta)
        covered.update((i, j))
    for q in range(spec.n):
        if q not in covered:
            register.apply_ry(q, ry_angle(spec.probs[q]))


def apply_layers(
    register: QuantumRegister,
    instance: KnapsackInstance,
    spec: CopulaSpec,
    pairing: PairingScheme,
    params: QaoaParams,
) -> None:
    """Apply every (cost, mixer) layer of ``params`` in order."""
    for gamma, beta in params.layers():
        apply_cost_layer(register, gamma, instance.values)
        apply_copula_mixer(register, beta, spec, pairing)


def run_circuit(
    instance: KnapsackInstance,
    spec: CopulaSpec,
    pairing: PairingScheme,
    params: QaoaParams,
    paired_init: bool = False,
    max_qubits: int = MAX_QUBITS,
) -> StateVector:
    """Simulate the copula-QAOA state.

    Args:
    ----
        instance: Knapsack instance supplying the cost coefficients
        spec: Warm-start marginals and copula correlation
        pairing: Qubit pairs of the mixer
        params: Layer angles; depth 0 returns the initial state
        paired_init: Prepare the first sublayer's pairs as R_cop|00> instead
            of the independent product state
        max_qubits: Simulator cap

    Returns:
    -------
        The final statevector

    """
    _check_dimensions(instance, spec, pairing)
    if paired_init:
        state = StateVector(instance.n, max_qubits)
        _prepare_paired(state, spec, pairing)
    else:
        state = StateVector.product_state(spec.probs, max_qubits)
    apply_layers(state, instance, spec, pairing, params)
    return state


def circuit_gates(
    instance: KnapsackInstance,
    spec: CopulaSpec,
    pairing: PairingScheme,
    params: QaoaParams,
    paired_init: bool = False,
) -> List[Dict[str, Any]]:
    """Gate list ``{gate, qubits, angle}`` of the circuit :func:`run_circuit` simulates."""
    _check_dimensions(instance, spec, pairing)
    recorder = GateRecorder(instance.n)
    if paired_init:
        _prepare_paired(recorder, spec, pairing)
    else:
        for q, p in enumerate(spec.probs):
            recorder.apply_ry(q, ry_angle(p))
    apply_layers(recorder, instance, spec, pairing, params)
    return recorder.gates


def warm_start_spec(
    instance: KnapsackInstance,
    k: float,
    theta: float = -1.0,
    r_star: Optional[float] = None,
    rule: str = "first_rejected",
) -> CopulaSpec:
    """Copula spec whose marginals are the smoothed greedy probabilities."""
    return CopulaSpec(smoothed_probabilities(instance, k, r_star, rule), theta)


@lru_cache(maxsize=8)
def basis_table(instance: KnapsackInstance) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value, weight and feasibility of every basis state, indexed little-endian.

    Sums accumulate in item order, matching ``KnapsackInstance.evaluate``.
    """
    values = subset_sums(instance.values)
    weights = subset_sums(instance.weights)
    feasible = weights <= instance.capacity
    for array in (values, weights, feasible):
        array.setflags(write=False)
    return values, weights, feasible


def objective_from_samples(instance: KnapsackInstance, samples: SampleSet) -> float:
    """Mean over all shots of the value if feasible, else 0."""
    total = 0.0
    for bitstring, count in samples.counts.items():
        value, _, feasible = instance.evaluate(Selection.from_string(bitstring).bits)
        if feasible:
            total += count * value
    return total / samples.shots


def objective_from_probabilities(instance: KnapsackInstance, probabilities: np.ndarray) -> float:
    """Exact counterpart of :func:`objective_from_samples` over a probability vector."""
    values, _, feasible = basis_table(instance)
    return float(np.dot(probabilities[feasible], values[feasible]))


def expected_cost_hamiltonian(state: StateVector, values: Sequence[float]) -> float:
    """Return <sum_i v_i Z_i>, ignoring feasibility."""
    n = state.n_qubits
    if len(values) != n:
        raise InvalidArgumentError(f"{len(values)} coefficients for {n} qubits")
    tensor = state.probabilities().reshape([2] * n)
    total = 0.0
    for q, v in enumerate(values):
        axes = tuple(a for a in range(n) if a != n - 1 - q)
        marginal = tensor.sum(axis=axes) if axes else tensor
        total += v * float(marginal[0] - marginal[1])
    return total
