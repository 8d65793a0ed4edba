"""Derivative-free local search over (gamma, beta).

Wraps scipy's Nelder-Mead simplex with a hard evaluation budget, a seeded
initial simplex and a best-so-far history. Objectives are maximized.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from copula_qaoa.domain.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

Point = Tuple[float, ...]


class _BudgetExhausted(Exception):
    """Raised inside the objective wrapper once the budget is spent."""


@dataclass(frozen=True)
class LocalSearchResult:
    """Outcome of :func:`local_optimize`.

    Attributes
    ----------
        point: Best point evaluated
        value: Objective at ``point``
        history: Best-so-far value after each evaluation, non-decreasing
        evaluations: Number of objective evaluations spent

    """

    point: Point
    value: float
    history: Tuple[float, ...]
    evaluations: int


class _Tracker:
    """Counts evaluations and remembers the best point seen."""

    def __init__(self, objective: Callable[..., float], budget: int):
        self.objective = objective
        self.budget = budget
        self.best_point: Optional[Point] = None
        self.best_value = -np.inf
        self.history: List[float] = []

    def __call__(self, x: np.ndarray) -> float:
        if len(self.history) >= self.budget:
            raise _BudgetExhausted
        point = tuple(float(v) for v in x)
        value = float(self.objective(*point))
        if self.best_point is None or value > self.best_value:
            self.best_point, self.best_value = point, value
        self.history.append(self.best_value)
        return -value


def local_optimize(
    objective: Callable[..., float],
    start: Sequence[float],
    budget: int,
    seed: Optional[int] = None,
    step: Sequence[float] = (0.1, 0.1),
    xatol: float = 1e-10,
    fatol: float = 1e-12,
) -> LocalSearchResult:
    """Maximize a black-box objective from ``start`` with at most ``budget`` evaluations.

    The first evaluation is always ``start`` itself; the remaining simplex
    vertices are ``start`` plus seeded random directions scaled by ``step``.

    Args:
    ----
        objective: Function of ``len(start)`` floats to maximize
        start: Initial point
        budget: Maximum number of evaluations, at least 1
        seed: Seed of the initial simplex directions
        step: Initial simplex size per coordinate
        xatol: Simplex size at which the search stops early
        fatol: Objective spread at which the search stops early

    Returns:
    -------
        Best point and value with the best-so-far history

    """
    if budget < 1:
        raise InvalidArgumentError(f"budget must be >= 1, got {budget}")
    x0 = np.asarray(start, dtype=float)
    dim = len(x0)
    scale = np.asarray(step, dtype=float)
    if scale.shape != (dim,):
        raise InvalidArgumentError(f"step must have {dim} entries, got {len(step)}")

    rng = np.random.default_rng(seed)
    simplex = [x0]
    for axis in range(dim):
        direction = np.zeros(dim)
        direction[axis] = scale[axis]
        direction *= rng.choice((-1.0, 1.0)) * rng.uniform(0.5, 1.5)
        simplex.append(x0 + direction)

    tracker = _Tracker(objective, budget)
    try:
        minimize(
            tracker,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": np.array(simplex),
                "maxfev": budget,
                "xatol": xatol,
                "fatol": fatol,
            },
        )
    except _BudgetExhausted:
        logger.debug("local search stopped at its budget of %d evaluations", budget)
    best_point = tracker.best_point if tracker.best_point is not None else tuple(x0.tolist())
    return LocalSearchResult(
        best_point, tracker.best_value, tuple(tracker.history), len(tracker.history)
    )
