"""Unit tests for the copula-QAOA circuit family in copula_qaoa.infrastructure.circuits."""

import numpy as np
import pytest

from copula_qaoa.domain.entities import (
    CopulaSpec,
    KnapsackInstance,
    PairingScheme,
    QaoaParams,
    SampleSet,
    Selection,
)
from copula_qaoa.domain.errors import InvalidArgumentError
from copula_qaoa.infrastructure.circuits import (
    apply_copula_mixer,
    apply_cost_layer,
    apply_rcop,
    apply_rcop_dagger,
    basis_table,
    circuit_gates,
    conditionals,
    copula_pmf,
    expected_cost_hamiltonian,
    objective_from_probabilities,
    objective_from_samples,
    ry_angle,
    run_circuit,
    warm_start_spec,
)
from copula_qaoa.infrastructure.solvers import smoothed_probabilities
from copula_qaoa.infrastructure.statevector import StateVector


class TestCopula:
    """Tests for the two-bit copula distribution."""

    @pytest.mark.parametrize("theta", [-1.0, -0.3, 0.0, 0.7, 1.0])
    def test_marginals_preserved(self, theta):
        """The joint distribution sums to 1 and keeps both marginals."""
        q00, q01, q10, q11 = copula_pmf(0.3, 0.8, theta)
        assert q00 + q01 + q10 + q11 == pytest.approx(1.0)
        assert q10 + q11 == pytest.approx(0.3)
        assert q01 + q11 == pytest.approx(0.8)
        assert min(q00, q01, q10, q11) >= 0.0

    def test_independent_at_zero(self):
        """theta = 0 gives the product distribution."""
        assert copula_pmf(0.3, 0.8, 0.0) == pytest.approx((0.14, 0.56, 0.06, 0.24))

    def test_negative_correlation(self):
        """theta = -1 makes both bits set less likely than independence."""
        assert copula_pmf(0.5, 0.5, -1.0)[3] == pytest.approx(0.25 - 0.0625)

    @pytest.mark.parametrize("theta", [-1.0, 0.5])
    def test_conditionals(self, theta):
        """Conditionals are the joint over the marginal of the first bit."""
        _, q01, _, q11 = copula_pmf(0.4, 0.6, theta)
        given_one, given_zero = conditionals(0.4, 0.6, theta)
        assert given_one == pytest.approx(q11 / 0.4)
        assert given_zero == pytest.approx(q01 / 0.6)

    def test_invalid_inputs(self):
        """Marginals and theta are range-checked."""
        with pytest.raises(InvalidArgumentError):
            copula_pmf(1.2, 0.5)
        with pytest.raises(InvalidArgumentError):
            copula_pmf(0.5, 0.5, 2.0)

    def test_ry_angle(self):
        """The angle rotates |0> onto the requested probability of 1."""
        state = StateVector(1)
        state.apply_ry(0, ry_angle(0.37))
        assert state.probabilities()[1] == pytest.approx(0.37)


class TestRcop:
    """Tests for the two-qubit copula rotation."""

    @pytest.mark.parametrize("theta", [-1.0, 0.4])
    def test_prepares_copula_amplitudes(self, theta):
        """R_cop|00> measures with the copula distribution."""
        state = StateVector(2)
        apply_rcop(state, 0, 1, 0.3, 0.8, theta)
        q00, q01, q10, q11 = copula_pmf(0.3, 0.8, theta)
        probs = state.probabilities()
        # index = bit of qubit 0 + 2 * bit of qubit 1
        assert probs == pytest.approx([q00, q10, q01, q11])

    def test_dagger_inverts(self):
        """R_cop followed by its inverse is the identity."""
        rng = np.random.default_rng(1)
        amplitudes = rng.normal(size=8) + 1j * rng.normal(size=8)
        amplitudes /= np.linalg.norm(amplitudes)
        state = StateVector.from_amplitudes(amplitudes)
        apply_rcop(state, 2, 0, 0.2, 0.65)
        apply_rcop_dagger(state, 2, 0, 0.2, 0.65)
        np.testing.assert_allclose(state.amplitudes, amplitudes, atol=1e-12)

    def test_same_qubit_rejected(self):
        """R_cop needs two qubits."""
        with pytest.raises(InvalidArgumentError):
            apply_rcop(StateVector(2), 1, 1, 0.5, 0.5)


class TestLayers:
    """Tests for the cost and mixer layers."""

    def test_cost_layer_is_diagonal(self, small_instance, spec):
        """The cost layer changes phases only."""
        state = StateVector.product_state(spec.probs)
        before = state.probabilities()
        apply_cost_layer(state, 0.37, small_instance.values)
        np.testing.assert_allclose(state.probabilities(), before, atol=1e-14)

    def test_zero_angles_are_identity(self, small_instance, spec, pairing):
        """gamma = 0 and beta = 0 leave the state unchanged."""
        state = StateVector.product_state(spec.probs)
        before = state.amplitudes.copy()
        apply_cost_layer(state, 0.0, small_instance.values)
        apply_copula_mixer(state, 0.0, spec, pairing)
        assert np.array_equal(state.amplitudes, before)

    def test_mixer_preserves_norm(self, spec, pairing):
        """The mixer is unitary."""
        state = StateVector.product_state(spec.probs)
        apply_copula_mixer(state, 0.9, spec, pairing)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_copula_state_is_mixer_eigenstate(self):
        """R_cop|00> only picks up a global phase under its own mixer."""
        spec = CopulaSpec((0.3, 0.8), -1.0)
        pairing = PairingScheme.ring(2)
        state = StateVector(2)
        apply_rcop(state, 0, 1, 0.3, 0.8)
        before = state.probabilities()
        apply_copula_mixer(state, 1.1, spec, pairing)
        np.testing.assert_allclose(state.probabilities(), before, atol=1e-12)

    def test_mixer_moves_product_state(self, spec, pairing):
        """A product state is not an eigenstate, so the mixer changes it."""
        state = StateVector.product_state(spec.probs)
        before = state.probabilities()
        apply_copula_mixer(state, 0.9, spec, pairing)
        assert not np.allclose(state.probabilities(), before)

    def test_dimension_checks(self, small_instance, spec, pairing):
        """Specs and coefficients must match the register."""
        with pytest.raises(InvalidArgumentError):
            apply_cost_layer(StateVector(2), 0.1, small_instance.values)
        with pytest.raises(InvalidArgumentError):
            apply_copula_mixer(StateVector(2), 0.1, spec, pairing)


class TestRunCircuit:
    """Tests for full circuit simulation."""

    def test_depth_zero_is_warm_start(self, small_instance, spec, pairing):
        """Without layers the state is the product of the marginals."""
        state = run_circuit(small_instance, spec, pairing, QaoaParams())
        expected = StateVector.product_state(spec.probs)
        np.testing.assert_allclose(state.amplitudes, expected.amplitudes)

    def test_paired_init_marginals(self, small_instance, spec, pairing):
        """The paired initial state keeps every qubit's marginal."""
        state = run_circuit(small_instance, spec, pairing, QaoaParams(), paired_init=True)
        tensor = state.probabilities().reshape([2] * small_instance.n)
        for q, p in enumerate(spec.probs):
            axes = tuple(a for a in range(small_instance.n) if a != small_instance.n - 1 - q)
            assert tensor.sum(axis=axes)[1] == pytest.approx(p)

    def test_mismatched_spec(self, small_instance, pairing):
        """The spec must have one marginal per item."""
        with pytest.raises(InvalidArgumentError):
            run_circuit(small_instance, CopulaSpec((0.5,)), pairing, QaoaParams())

    def test_gate_list(self, small_instance, spec, pairing):
        """The exported gate list follows the simulated circuit."""
        gates = circuit_gates(small_instance, spec, pairing, QaoaParams((0.2,), (0.3,)))
        n, pairs = small_instance.n, len(pairing.pairs)
        assert len(gates) == n + n + 8 * pairs
        assert [g["gate"] for g in gates[:n]] == ["ry"] * n
        assert all(g["gate"] == "phase_z" for g in gates[n : 2 * n])

    def test_warm_start_spec(self, classic_instance):
        """Warm-start marginals are the smoothed greedy probabilities."""
        spec = warm_start_spec(classic_instance, 3.0, theta=0.2)
        assert spec.probs == smoothed_probabilities(classic_instance, 3.0)
        assert spec.theta == 0.2


class TestObjective:
    """Tests for feasibility-masked objectives."""

    def test_basis_table_matches_evaluate(self, small_instance):
        """Every basis state is valued exactly as evaluate() would."""
        values, weights, feasible = basis_table(small_instance)
        for index in range(1 << small_instance.n):
            value, weight, ok = small_instance.evaluate(Selection.from_index(index, 6).bits)
            assert values[index] == value
            assert weights[index] == weight
            assert feasible[index] == ok

    def test_sampled_objective(self, classic_instance):
        """Infeasible shots count as zero."""
        samples = SampleSet.from_counts({"011": 1, "111": 1, "100": 2})
        assert objective_from_samples(classic_instance, samples) == pytest.approx(
            (220 + 0 + 2 * 60) / 4
        )

    def test_exact_objective(self, classic_instance):
        """The exact objective weights feasible values by probability."""
        probs = np.zeros(8)
        probs[Selection.from_string("011").index] = 0.5
        probs[Selection.from_string("111").index] = 0.5
        assert objective_from_probabilities(classic_instance, probs) == pytest.approx(110.0)

    def test_expected_cost_hamiltonian(self):
        """<Z_q> of a product state is 1 - 2 p_q."""
        state = StateVector.product_state([0.2, 0.9])
        expected = 3.0 * (1 - 0.4) + 5.0 * (1 - 1.8)
        assert expected_cost_hamiltonian(state, [3.0, 5.0]) == pytest.approx(expected)

    def test_real_weights(self):
        """Objectives work for real-valued instances."""
        instance = KnapsackInstance.from_pairs([(1.5, 0.25), (2.5, 0.5)], 0.6)
        state = StateVector.product_state([0.5, 0.5])
        expected = 0.25 * (0 + 1.5 + 2.5)
        assert objective_from_probabilities(instance, state.probabilities()) == pytest.approx(
            expected
        )
