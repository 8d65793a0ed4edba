"""Unit tests for the statevector simulator in copula_qaoa.infrastructure.statevector."""

import math

import numpy as np
import pytest

from copula_qaoa.domain.errors import InvalidArgumentError, ResourceLimitError
from copula_qaoa.infrastructure.statevector import (
    GateRecorder,
    StateVector,
    bitstring_to_index,
    index_to_bitstring,
    sample_uniform,
)


class TestBasisConventions:
    """Tests for bitstring and index conversion."""

    def test_qubit_zero_first(self):
        """Character i of the bitstring is bit i of the index."""
        assert index_to_bitstring(1, 3) == "100"
        assert index_to_bitstring(6, 3) == "011"
        assert bitstring_to_index("011") == 6


class TestStateVector:
    """Tests for the StateVector class."""

    def test_initial_state(self):
        """A new register is |0...0>."""
        state = StateVector(3)
        assert state.n_qubits == 3
        assert state.probabilities()[0] == 1.0
        assert state.norm() == pytest.approx(1.0)

    def test_qubit_cap(self):
        """Registers above the cap are refused."""
        with pytest.raises(ResourceLimitError):
            StateVector(5, max_qubits=4)
        with pytest.raises(InvalidArgumentError):
            StateVector(0)

    def test_ry_rotates_target_qubit(self):
        """RY(pi) on qubit 1 of two flips it to |1> at index 2."""
        state = StateVector(2)
        state.apply_ry(1, math.pi)
        assert state.probabilities() == pytest.approx([0.0, 0.0, 1.0, 0.0], abs=1e-15)
        assert state.distribution(floor=1e-12) == {"01": pytest.approx(1.0)}

    def test_product_state(self):
        """Each qubit carries its own marginal."""
        state = StateVector.product_state([0.2, 0.7])
        probs = state.probabilities()
        assert probs[1] + probs[3] == pytest.approx(0.2)
        assert probs[2] + probs[3] == pytest.approx(0.7)
        assert probs[3] == pytest.approx(0.14)

    def test_product_state_rejects_bad_probabilities(self):
        """Marginals must lie in [0, 1]."""
        with pytest.raises(InvalidArgumentError):
            StateVector.product_state([0.5, 1.5])

    def test_controlled_ry(self):
        """The rotation acts only where the control has the requested value."""
        state = StateVector(2)
        state.apply_controlled_ry(0, 1, math.pi, control_value=0)
        assert state.probabilities()[2] == pytest.approx(1.0)
        state = StateVector(2)
        state.apply_controlled_ry(0, 1, math.pi, control_value=1)
        assert state.probabilities()[0] == pytest.approx(1.0)

    def test_phase_z(self):
        """The Z phase multiplies |0> by e^{-ia} and |1> by e^{ia}."""
        state = StateVector.from_amplitudes(np.array([1, 1]) / math.sqrt(2))
        state.apply_phase_z(0, 0.3)
        expected = np.array([np.exp(-0.3j), np.exp(0.3j)]) / math.sqrt(2)
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_rz_is_half_angle_phase(self):
        """RZ(2a) equals the Z phase of angle a."""
        first = StateVector.product_state([0.3, 0.6])
        second = first.copy()
        first.apply_rz(1, 0.8)
        second.apply_phase_z(1, 0.4)
        np.testing.assert_allclose(first.amplitudes, second.amplitudes, atol=1e-15)

    @pytest.mark.parametrize(("control", "target"), [(0, 0), (0, 3)])
    def test_invalid_qubits(self, control, target):
        """Qubits must be distinct and in range."""
        with pytest.raises(InvalidArgumentError):
            StateVector(3).apply_controlled_ry(control, target, 0.1)

    def test_from_amplitudes_length(self):
        """Amplitude vectors must have a power-of-two length."""
        with pytest.raises(InvalidArgumentError):
            StateVector.from_amplitudes(np.ones(3))

    def test_copy_is_independent(self):
        """Mutating a copy leaves the original untouched."""
        state = StateVector(1)
        clone = state.copy()
        clone.apply_ry(0, 1.0)
        assert state.probabilities()[0] == 1.0


class TestSampling:
    """Tests for measurement sampling."""

    def test_seeded_sampling_is_reproducible(self):
        """Equal seeds give equal samples."""
        state = StateVector.product_state([0.3, 0.5, 0.8])
        assert state.sample(500, seed=11) == state.sample(500, seed=11)

    def test_deterministic_state(self):
        """A basis state is always measured as itself."""
        state = StateVector(3)
        state.apply_ry(2, math.pi)
        samples = state.sample(50, seed=0)
        assert samples.counts == {"001": 50}

    def test_frequencies_match_probabilities(self):
        """Sample frequencies approach the marginals."""
        samples = StateVector.product_state([0.25]).sample(20_000, seed=3)
        assert samples.counts["1"] / samples.shots == pytest.approx(0.25, abs=0.02)

    def test_shots_must_be_positive(self):
        """At least one shot is needed."""
        with pytest.raises(InvalidArgumentError):
            StateVector(1).sample(0)

    def test_uniform_sampler(self):
        """The random baseline draws n-bit strings with the requested shots."""
        samples = sample_uniform(4, 1000, seed=5)
        assert samples.shots == 1000
        assert all(len(bitstring) == 4 for bitstring in samples.counts)
        assert samples == sample_uniform(4, 1000, seed=5)


class TestGateRecorder:
    """Tests for the GateRecorder class."""

    def test_records_gates(self):
        """Gates are recorded in order with their angles."""
        recorder = GateRecorder(2)
        recorder.apply_ry(0, 0.5)
        recorder.apply_controlled_ry(0, 1, 0.25, control_value=0)
        recorder.apply_phase_z(1, 1.0)
        assert recorder.gates == [
            {"gate": "ry", "qubits": [0], "angle": 0.5},
            {"gate": "c0ry", "qubits": [0, 1], "angle": 0.25},
            {"gate": "phase_z", "qubits": [1], "angle": 1.0},
        ]
