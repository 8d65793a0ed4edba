"""Classical knapsack solvers.

This module implements the KnapsackSolver protocol from
copula_qaoa.protocols.interfaces with the lazy greedy baseline and three
exact oracles (dynamic programming, branch-and-bound, brute force), plus the
smoothed warm-start probabilities derived from the greedy stopping point.
"""

from __future__ import annotations

import logging
import math
import time
from bisect import bisect_right
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from copula_qaoa.domain.entities import KnapsackInstance, Selection, SolveResult
from copula_qaoa.domain.errors import (
    InvalidArgumentError,
    NonIntegerWeightsError,
    ResourceLimitError,
)
from copula_qaoa.protocols.interfaces import KnapsackSolver

logger = logging.getLogger(__name__)

DP_CELL_BUDGET = 10**9
BRUTE_FORCE_MAX_ITEMS = 25
BOUND_TOLERANCE = 1e-9
SPREAD_FLOOR = 1e-9
STOPPING_RULES = ("first_rejected", "midpoint")


def ratio_order(instance: KnapsackInstance) -> List[int]:
    """Item indices by non-increasing value/weight ratio, lower index first on ties."""
    ratios = instance.ratios
    return sorted(range(instance.n), key=lambda i: (-ratios[i], i))


def _greedy_pass(instance: KnapsackInstance) -> Tuple[List[int], Optional[int]]:
    """Run lazy greedy; return accepted indices in ratio order and the first rejected index."""
    accepted: List[int] = []
    used = 0.0
    for i in ratio_order(instance):
        weight = instance.items[i].weight
        if used + weight > instance.capacity:
            return accepted, i
        accepted.append(i)
        used += weight
    return accepted, None


def _trim_to_capacity(
    instance: KnapsackInstance, bits: List[int], order: Sequence[int]
) -> List[int]:
    # sums taken in another order can differ from evaluate() in the last ulp
    for i in reversed(order):
        if instance.evaluate(bits)[2]:
            break
        bits[i] = 0
    return bits


def dantzig_bound(instance: KnapsackInstance) -> float:
    """Fractional-relaxation upper bound of the whole instance."""
    room = instance.capacity
    bound = 0.0
    for i in ratio_order(instance):
        item = instance.items[i]
        if item.weight <= room:
            bound += item.value
            room -= item.weight
        else:
            bound += room * item.ratio
            break
    return bound


def stopping_ratio(instance: KnapsackInstance, rule: str = "first_rejected") -> float:
    """Return the greedy stopping ratio r* used to center the warm start.

    By default (``rule="first_rejected"``) r* is the ratio of the first item
    lazy greedy rejects. ``"midpoint"`` puts r* halfway between the last
    accepted and the first rejected ratio, so a very steep logistic selects
    exactly the greedy items. When nothing is rejected r* is the minimum ratio.
    """
    if rule not in STOPPING_RULES:
        raise InvalidArgumentError(f"unknown stopping rule {rule!r}, expected {STOPPING_RULES}")
    ratios = instance.ratios
    accepted, rejected = _greedy_pass(instance)
    if rejected is None:
        return min(ratios)
    first_rejected = ratios[rejected]
    if rule == "first_rejected" or not accepted:
        return first_rejected
    last_accepted = ratios[accepted[-1]]
    if math.isinf(last_accepted):
        return first_rejected
    return 0.5 * (last_accepted + first_rejected)


def smoothed_probabilities(
    instance: KnapsackInstance,
    k: float,
    r_star: Optional[float] = None,
    rule: str = "first_rejected",
) -> Tuple[float, ...]:
    """Logistic selection probabilities around the greedy stopping ratio.

    p_i = 1 / (1 + C * exp(-k * (r_i - r*))) with C = sum(w) / c - 1, floored
    at 1e-9 when every item fits.

    Args:
    ----
        instance: The knapsack instance
        k: Steepness, strictly positive
        r_star: Center ratio; defaults to :func:`stopping_ratio` with ``rule``
        rule: Stopping-ratio rule used when ``r_star`` is not given

    Returns:
    -------
        One probability per item, in index order

    """
    if not (k > 0 and math.isfinite(k)):
        raise InvalidArgumentError(f"k must be a positive finite number, got {k}")
    center = stopping_ratio(instance, rule) if r_star is None else float(r_star)
    total = math.fsum(instance.weights)
    spread = total / instance.capacity - 1.0 if instance.capacity > 0 else math.inf
    spread = max(spread, SPREAD_FLOOR)
    ratios = np.asarray(instance.ratios, dtype=float)
    with np.errstate(invalid="ignore"):
        diff = ratios - center
        z = k * np.where(np.isnan(diff), np.inf, diff) - math.log(spread)
    z = np.where(np.isnan(z), np.inf, z)
    return tuple(float(p) for p in expit(z))


class LazyGreedySolver(KnapsackSolver):
    """Ratio-ordered greedy that stops at the first item that does not fit.

    In ratio order the selection is a block of ones followed by zeros.
    """

    @property
    def name(self) -> str:
        """Return the solver name."""
        return "greedy"

    @property
    def thread_safe(self) -> bool:
        """Return True; the solver keeps no state."""
        return True

    def solve(self, instance: KnapsackInstance) -> SolveResult:
        """Run lazy greedy on ``instance``.

        Args:
        ----
            instance: The knapsack instance

        Returns:
        -------
            Greedy selection with the Dantzig bound as upper bound

        """
        accepted, _ = _greedy_pass(instance)
        bits = [0] * instance.n
        for i in accepted:
            bits[i] = 1
        bits = _trim_to_capacity(instance, bits, accepted)
        bound = dantzig_bound(instance)
        value = instance.evaluate(bits)[0]
        return SolveResult.from_selection(
            instance, Selection(tuple(bits)), self.name, bound <= value, bound
        )


class DynamicProgrammingSolver(KnapsackSolver):
    """Exact solver over integer capacities."""

    def __init__(self, cell_budget: int = DP_CELL_BUDGET):
        """Initialize with a cap on n * (capacity + 1) table cells."""
        self.cell_budget = cell_budget

    @property
    def name(self) -> str:
        """Return the solver name."""
        return "dp"

    @property
    def thread_safe(self) -> bool:
        """Return True; the solver keeps no state."""
        return True

    def solve(self, instance: KnapsackInstance) -> SolveResult:
        """Solve exactly by dynamic programming over capacity.

        Raises
        ------
            NonIntegerWeightsError: If a weight or the capacity is not integral
            ResourceLimitError: If the table would exceed ``cell_budget`` cells

        """
        if not float(instance.capacity).is_integer() or not all(
            float(w).is_integer() for w in instance.weights
        ):
            raise NonIntegerWeightsError(
                "dynamic programming needs integer weights and capacity; "
                "use branch-and-bound (bnb) for real weights"
            )
        capacity = int(instance.capacity)
        cells = instance.n * (capacity + 1)
        if cells > self.cell_budget:
            raise ResourceLimitError(
                f"DP table of {cells} cells exceeds the budget of {self.cell_budget}"
            )

        best = np.zeros(capacity + 1)
        keep = np.zeros((instance.n, capacity + 1), dtype=bool)
        for i, item in enumerate(instance.items):
            weight = int(item.weight)
            if weight > capacity:
                continue
            if weight == 0:
                if item.value > 0:
                    keep[i, :] = True
                    best += item.value
                continue
            candidate = best[: capacity + 1 - weight] + item.value
            improve = candidate > best[weight:]
            keep[i, weight:] = improve
            best[weight:] = np.where(improve, candidate, best[weight:])

        bits = [0] * instance.n
        room = capacity
        for i in range(instance.n - 1, -1, -1):
            if keep[i, room]:
                bits[i] = 1
                room -= int(instance.items[i].weight)
        return SolveResult.from_selection(instance, Selection(tuple(bits)), self.name, True)


class BranchAndBoundSolver(KnapsackSolver):
    """Depth-first branch-and-bound with the Dantzig fractional bound.

    Items are visited in ratio order and the take branch is explored before
    the skip branch. A node is pruned when its bound does not exceed the
    incumbent by more than ``tolerance``.
    """

    def __init__(self, time_budget: Optional[float] = None, tolerance: float = BOUND_TOLERANCE):
        """Initialize with an optional wall-clock budget in seconds."""
        self.time_budget = time_budget
        self.tolerance = tolerance

    @property
    def name(self) -> str:
        """Return the solver name."""
        return "bnb"

    @property
    def thread_safe(self) -> bool:
        """Return True; search state is local to each call."""
        return True

    def solve(self, instance: KnapsackInstance) -> SolveResult:
        """Search for the optimum; on timeout return the incumbent unproven."""
        n = instance.n
        order = ratio_order(instance)
        weights = [instance.items[i].weight for i in order]
        values = [instance.items[i].value for i in order]
        weight_prefix = [0.0]
        value_prefix = [0.0]
        for w, v in zip(weights, values):
            weight_prefix.append(weight_prefix[-1] + w)
            value_prefix.append(value_prefix[-1] + v)

        def bound(k: int, value: float, room: float) -> float:
            j = bisect_right(weight_prefix, weight_prefix[k] + room, lo=k) - 1
            result = value + value_prefix[j] - value_prefix[k]
            if j < n and weights[j] > 0:
                rest = room - (weight_prefix[j] - weight_prefix[k])
                if rest > 0:
                    result += rest * values[j] / weights[j]
            return result

        best_value, best_mask = 0.0, 0
        stack: List[Tuple[int, float, float, int]] = [(0, 0.0, 0.0, 0)]
        start = time.perf_counter()
        nodes = 0
        timed_out = False
        while stack:
            nodes += 1
            if (
                self.time_budget is not None
                and nodes % 256 == 0
                and time.perf_counter() - start > self.time_budget
            ):
                timed_out = True
                break
            k, value, weight, mask = stack.pop()
            if value > best_value:
                best_value, best_mask = value, mask
            if k == n:
                continue
            room = instance.capacity - weight
            if bound(k, value, room) <= best_value + self.tolerance:
                continue
            stack.append((k + 1, value, weight, mask))
            if weights[k] <= room:
                stack.append((k + 1, value + values[k], weight + weights[k], mask | (1 << k)))

        bits = [0] * n
        for pos in range(n):
            if (best_mask >> pos) & 1:
                bits[order[pos]] = 1
        bits = _trim_to_capacity(instance, bits, order)
        if timed_out:
            remaining = max(
                (bound(k, v, instance.capacity - w) for k, v, w, _ in stack), default=best_value
            )
            logger.info(
                "branch-and-bound hit its %.3fs budget after %d nodes", self.time_budget, nodes
            )
            return SolveResult.from_selection(
                instance, Selection(tuple(bits)), self.name, False, max(remaining, best_value)
            )
        logger.debug("branch-and-bound proved optimality after %d nodes", nodes)
        return SolveResult.from_selection(instance, Selection(tuple(bits)), self.name, True)


def subset_sums(increments: Sequence[float]) -> np.ndarray:
    """Sums of every subset, indexed little-endian, accumulated in index order."""
    table = np.zeros(1)
    for x in increments:
        table = np.concatenate([table, table + x])
    return table


class BruteForceSolver(KnapsackSolver):
    """Exhaustive enumeration, ties broken by the lexicographically smallest bit vector."""

    def __init__(self, max_items: int = BRUTE_FORCE_MAX_ITEMS, chunk_bits: int = 20):
        """Initialize with a hard cap on the number of items."""
        self.max_items = max_items
        self.chunk_bits = chunk_bits

    @property
    def name(self) -> str:
        """Return the solver name."""
        return "brute"

    @property
    def thread_safe(self) -> bool:
        """Return True; the solver keeps no state."""
        return True

    def solve(self, instance: KnapsackInstance) -> SolveResult:
        """Enumerate all 2^n selections.

        Raises
        ------
            ResourceLimitError: If the instance has more than ``max_items`` items

        """
        n = instance.n
        if n > self.max_items:
            raise ResourceLimitError(f"brute force is capped at {self.max_items} items, got {n}")
        low = min(n, self.chunk_bits)
        values, weights = instance.values, instance.weights
        low_values = subset_sums(values[:low])
        low_weights = subset_sums(weights[:low])
        # lexicographic key: item 0 is the most significant position
        low_keys = subset_sums([float(1 << (n - 1 - i)) for i in range(low)]).astype(np.int64)

        best_value, best_key = -math.inf, 0
        for high in range(1 << (n - low)):
            chunk_values = low_values.copy()
            chunk_weights = low_weights.copy()
            high_key = 0
            for i in range(low, n):
                if (high >> (i - low)) & 1:
                    chunk_values += values[i]
                    chunk_weights += weights[i]
                    high_key += 1 << (n - 1 - i)
            feasible = chunk_weights <= instance.capacity
            if not feasible.any():
                continue
            top = chunk_values[feasible].max()
            ties = feasible & (chunk_values == top)
            key = int(low_keys[ties].min()) + high_key
            if top > best_value or (top == best_value and key < best_key):
                best_value, best_key = float(top), key

        bits = tuple((best_key >> (n - 1 - i)) & 1 for i in range(n))
        return SolveResult.from_selection(instance, Selection(bits), self.name, True)


def get_default_solvers() -> Dict[str, KnapsackSolver]:
    """Get a dictionary of the built-in knapsack solvers.

    Returns
    -------
        Dictionary mapping solver names to solver instances

    """
    solvers: List[KnapsackSolver] = [
        LazyGreedySolver(),
        DynamicProgrammingSolver(),
        BranchAndBoundSolver(),
        BruteForceSolver(),
    ]
    return {solver.name: solver for solver in solvers}


def evaluate(instance: KnapsackInstance, bits: Sequence[int]) -> Tuple[float, float, bool]:
    """Return (value, weight, feasible) of ``bits`` on ``instance``."""
    return instance.evaluate(bits)


def lazy_greedy(instance: KnapsackInstance) -> SolveResult:
    """Solve with :class:`LazyGreedySolver`."""
    return LazyGreedySolver().solve(instance)


def solve_dp(instance: KnapsackInstance, cell_budget: int = DP_CELL_BUDGET) -> SolveResult:
    """Solve with :class:`DynamicProgrammingSolver`."""
    return DynamicProgrammingSolver(cell_budget).solve(instance)


def solve_branch_bound(
    instance: KnapsackInstance, time_budget: Optional[float] = None
) -> SolveResult:
    """Solve with :class:`BranchAndBoundSolver`."""
    return BranchAndBoundSolver(time_budget).solve(instance)


def brute_force(instance: KnapsackInstance) -> SolveResult:
    """Solve with :class:`BruteForceSolver`."""
    return BruteForceSolver().solve(instance)
