"""Unit tests for the classical solvers in copula_qaoa.infrastructure.solvers."""

import math

import pytest

from copula_qaoa.domain.entities import KnapsackInstance
from copula_qaoa.domain.errors import (
    InvalidArgumentError,
    NonIntegerWeightsError,
    ResourceLimitError,
)
from copula_qaoa.infrastructure.generators import gen_inverse_strongly_correlated
from copula_qaoa.infrastructure.solvers import (
    BranchAndBoundSolver,
    BruteForceSolver,
    DynamicProgrammingSolver,
    LazyGreedySolver,
    brute_force,
    dantzig_bound,
    get_default_solvers,
    lazy_greedy,
    ratio_order,
    smoothed_probabilities,
    solve_branch_bound,
    solve_dp,
    stopping_ratio,
    subset_sums,
)


class TestLazyGreedy:
    """Tests for the lazy greedy baseline."""

    def test_classic_instance(self, classic_instance):
        """Greedy takes the two best ratios and stops at the third item."""
        result = lazy_greedy(classic_instance)
        assert result.selection.as_string() == "110"
        assert result.value == 160.0
        assert result.weight == 30.0
        assert result.method == "greedy"
        assert not result.proven_optimal
        assert result.upper_bound == pytest.approx(240.0)

    def test_stops_at_first_rejection(self):
        """Items after the first rejected one are never taken, even if they fit."""
        instance = KnapsackInstance.from_pairs([(10, 5), (9, 3), (1, 1)], 6)
        assert lazy_greedy(instance).selection.as_string() == "010"

    def test_ratio_ties_keep_index_order(self):
        """Equal ratios are visited lower index first."""
        instance = KnapsackInstance.from_pairs([(20, 10), (10, 5), (4, 1)], 11)
        assert ratio_order(instance) == [2, 0, 1]
        assert lazy_greedy(instance).selection.as_string() == "101"

    def test_everything_fits(self):
        """When nothing is rejected greedy is optimal and says so."""
        instance = KnapsackInstance.from_pairs([(3, 1), (4, 2)], 10)
        result = LazyGreedySolver().solve(instance)
        assert result.selection.as_string() == "11"
        assert result.proven_optimal

    def test_dantzig_bound(self, classic_instance):
        """The fractional bound fills the remaining room with the next ratio."""
        assert dantzig_bound(classic_instance) == pytest.approx(240.0)


class TestStoppingRatio:
    """Tests for the greedy stopping ratio and the warm-start marginals."""

    def test_first_rejected_is_default(self, classic_instance):
        """By default r* is the ratio of the first rejected item."""
        assert stopping_ratio(classic_instance) == pytest.approx(4.0)
        assert stopping_ratio(classic_instance, "first_rejected") == pytest.approx(4.0)

    def test_midpoint(self, classic_instance):
        """The midpoint sits between the last accepted and first rejected ratio."""
        assert stopping_ratio(classic_instance, "midpoint") == pytest.approx(4.5)

    def test_nothing_rejected(self):
        """With every item accepted the minimum ratio is used."""
        instance = KnapsackInstance.from_pairs([(3, 1), (4, 2)], 10)
        assert stopping_ratio(instance) == 2.0

    def test_unknown_rule(self, classic_instance):
        """Only the two documented rules exist."""
        with pytest.raises(InvalidArgumentError):
            stopping_ratio(classic_instance, "median")

    def test_probabilities_formula(self, classic_instance):
        """p_i = 1 / (1 + C exp(-k (r_i - r*))) with C = sum(w)/c - 1."""
        k = 2.0
        probs = smoothed_probabilities(classic_instance, k)
        spread = 60 / 50 - 1
        for ratio, p in zip(classic_instance.ratios, probs):
            expected = 1.0 / (1.0 + spread * math.exp(-k * (ratio - 4.0)))
            assert p == pytest.approx(expected, rel=1e-12)

    def test_steep_logistic_recovers_greedy(self, classic_instance):
        """With the midpoint rule a large k pushes accepted items to 1 and rejected items to 0."""
        probs = smoothed_probabilities(classic_instance, 200.0, rule="midpoint")
        assert probs[0] > 1 - 1e-9
        assert probs[1] > 1 - 1e-9
        assert probs[2] < 1e-9

    def test_first_rejected_item_sits_at_center(self, classic_instance):
        """Under the default rule the first rejected item gets 1 / (1 + C) for every k."""
        for k in (1.0, 200.0):
            probs = smoothed_probabilities(classic_instance, k)
            assert probs[2] == pytest.approx(1.0 / 1.2, rel=1e-12)

    def test_probabilities_stay_in_unit_interval(self):
        """Weightless items and a tiny spread stay well defined."""
        instance = KnapsackInstance.from_pairs([(5, 0), (3, 2), (1, 4)], 6)
        probs = smoothed_probabilities(instance, 50.0)
        assert all(0.0 <= p <= 1.0 for p in probs)
        assert probs[0] == 1.0

    @pytest.mark.parametrize("k", [0.0, -1.0, math.inf])
    def test_invalid_k(self, classic_instance, k):
        """The steepness must be positive and finite."""
        with pytest.raises(InvalidArgumentError):
            smoothed_probabilities(classic_instance, k)


class TestExactSolvers:
    """Tests for dynamic programming, branch-and-bound and brute force."""

    @pytest.mark.parametrize("solve", [solve_dp, solve_branch_bound, brute_force])
    def test_classic_optimum(self, classic_instance, solve):
        """Every exact solver finds 220 and proves it."""
        result = solve(classic_instance)
        assert result.value == 220.0
        assert result.selection.as_string() == "011"
        assert result.proven_optimal
        assert result.upper_bound == result.value

    @pytest.mark.parametrize("seed", range(5))
    def test_solvers_agree(self, seed):
        """DP, branch-and-bound and brute force agree on generated instances."""
        instance = gen_inverse_strongly_correlated(12, seed)
        values = {solve(instance).value for solve in (solve_dp, solve_branch_bound, brute_force)}
        assert len(values) == 1

    def test_dp_rejects_real_weights(self):
        """DP needs integral weights and points at branch-and-bound."""
        instance = KnapsackInstance.from_pairs([(1, 0.5), (2, 1.5)], 1.0)
        with pytest.raises(NonIntegerWeightsError, match="bnb"):
            solve_dp(instance)

    def test_dp_cell_budget(self, classic_instance):
        """DP refuses tables over its cell budget."""
        with pytest.raises(ResourceLimitError):
            DynamicProgrammingSolver(cell_budget=10).solve(classic_instance)

    def test_bnb_on_real_weights(self):
        """Branch-and-bound handles real weights exactly."""
        instance = KnapsackInstance.from_pairs([(1.5, 0.5), (2.25, 1.25), (2.0, 0.75)], 1.3)
        result = BranchAndBoundSolver().solve(instance)
        assert result.value == brute_force(instance).value
        assert result.proven_optimal

    def test_brute_force_cap(self):
        """Brute force refuses instances over its item cap."""
        instance = KnapsackInstance.from_pairs([(1, 1)] * 4, 2)
        with pytest.raises(ResourceLimitError):
            BruteForceSolver(max_items=3).solve(instance)

    def test_brute_force_tie_break(self):
        """Among equal optima the lexicographically smallest bit vector wins."""
        instance = KnapsackInstance.from_pairs([(5, 3), (5, 3), (5, 3)], 3)
        assert brute_force(instance).selection.as_string() == "001"

    def test_brute_force_chunked(self):
        """Splitting the enumeration into chunks does not change the answer."""
        instance = gen_inverse_strongly_correlated(10, 7)
        whole = BruteForceSolver().solve(instance)
        chunked = BruteForceSolver(chunk_bits=4).solve(instance)
        assert whole == chunked

    def test_zero_capacity(self):
        """Only weightless items fit into an empty knapsack."""
        instance = KnapsackInstance.from_pairs([(3, 0), (4, 2)], 0)
        assert solve_dp(instance).selection.as_string() == "10"
        assert solve_branch_bound(instance).selection.as_string() == "10"
        assert brute_force(instance).selection.as_string() == "10"


class TestRegistry:
    """Tests for the solver registry and helpers."""

    def test_default_solvers(self):
        """The registry names every built-in solver."""
        solvers = get_default_solvers()
        assert sorted(solvers) == ["bnb", "brute", "dp", "greedy"]
        assert all(solver.thread_safe for solver in solvers.values())

    def test_subset_sums(self):
        """Subset sums are indexed little-endian."""
        assert subset_sums([1.0, 10.0]).tolist() == [0.0, 1.0, 10.0, 11.0]
