"""Random instance generators.

Knapsack instances follow the inversely strongly correlated family; unit
commitment instances draw each coefficient uniformly from a configurable
range.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from copula_qaoa.domain.entities import Item, KnapsackInstance, UcInstance, UcUnit
from copula_qaoa.domain.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

Range = Tuple[float, float]


def gen_inverse_strongly_correlated(n: int, seed: int) -> KnapsackInstance:
    """Generate an inversely strongly correlated knapsack instance.

    Values are uniform on 1..1000, each weight is uniform on
    value+98..value+102, and the capacity is ceil(alpha * sum(w) / 100) with
    alpha uniform on 10..20.

    Args:
    ----
        n: Number of items, at least 1
        seed: 64-bit seed; equal seeds give equal instances

    Returns:
    -------
        The generated instance with integer values, weights and capacity

    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed & ((1 << 64) - 1))
    values = rng.integers(1, 1000, size=n, endpoint=True)
    weights = values + rng.integers(98, 102, size=n, endpoint=True)
    alpha = int(rng.integers(10, 20, endpoint=True))
    total = int(weights.sum())
    # integer ceiling keeps the capacity exact for large sums
    capacity = -(-alpha * total // 100)
    items = tuple(Item(float(v), float(w)) for v, w in zip(values.tolist(), weights.tolist()))
    logger.debug("generated isc instance n=%d alpha=%d capacity=%d", n, alpha, capacity)
    return KnapsackInstance(items, float(capacity), f"isc-n{n}-s{seed}")


@dataclass(frozen=True)
class UcRanges:
    """Sampling ranges for random unit-commitment instances.

    Attributes
    ----------
        commit_cost: Range of A
        linear_cost: Range of B
        quadratic_cost: Range of C
        p_min: Range of minimum output
        p_max: Range of maximum output

    """

    commit_cost: Range = (10.0, 50.0)
    linear_cost: Range = (0.5, 1.5)
    quadratic_cost: Range = (0.01, 0.2)
    p_min: Range = (10.0, 20.0)
    p_max: Range = (50.0, 100.0)


def gen_random_uc(
    n: int, seed: int, load_factor: float = 0.5, ranges: UcRanges = UcRanges()
) -> UcInstance:
    """Generate a random single-period unit-commitment instance.

    The load is ``load_factor`` times the total maximum output.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if not 0 < load_factor <= 1:
        raise InvalidArgumentError(f"load_factor must lie in (0, 1], got {load_factor}")
    rng = np.random.default_rng(seed & ((1 << 64) - 1))

    def draw(bounds: Range) -> np.ndarray:
        return rng.uniform(bounds[0], bounds[1], size=n)

    a, b, c = draw(ranges.commit_cost), draw(ranges.linear_cost), draw(ranges.quadratic_cost)
    p_min, p_max = draw(ranges.p_min), draw(ranges.p_max)
    p_max = np.maximum(p_min, p_max)
    units = tuple(
        UcUnit(float(a[i]), float(b[i]), float(c[i]), float(p_min[i]), float(p_max[i]))
        for i in range(n)
    )
    load = load_factor * math.fsum(u.p_max for u in units)
    return UcInstance(units, load, f"uc-n{n}-s{seed}")
