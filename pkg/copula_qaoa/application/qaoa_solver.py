"""Copula-QAOA wrapped as a knapsack solver.

The wrapper lets the unit-commitment scan (or anything else taking a
KnapsackSolver) use the quantum routine: warm start, optional depth-1 grid
search, optional layer-wise training, a final measurement, and the best
feasible sampled selection as the answer.
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from copula_qaoa.application.metrics import best_feasible
from copula_qaoa.application.training import grid_search_p1, train_layerwise
from copula_qaoa.domain.entities import (
    CopulaSpec,
    KnapsackInstance,
    PairingScheme,
    QaoaParams,
    Selection,
    SolveResult,
    TrainConfig,
)
from copula_qaoa.domain.errors import InvalidArgumentError, UndefinedMetricError
from copula_qaoa.infrastructure.circuits import run_circuit, warm_start_spec
from copula_qaoa.infrastructure.seeding import derive_seed
from copula_qaoa.infrastructure.solvers import STOPPING_RULES, dantzig_bound
from copula_qaoa.protocols.interfaces import KnapsackSolver

logger = logging.getLogger(__name__)


class CopulaQaoaSolver(KnapsackSolver):
    """Knapsack solver that samples a copula-QAOA circuit.

    Every random draw is seeded from ``seed`` and the instance id, so
    results do not depend on call order and concurrent calls are safe.

    Attributes
    ----------
        k: Warm-start steepness
        theta: Copula correlation
        stopping_rule: Rule placing the warm-start center ratio
        depth: Layers to train; 0 skips training
        grid_size: Points per axis of a depth-1 grid search; 0 skips it
        shots: Shots of the final measurement
        train_config: Restarts, budgets and ranges of the training
        seed: Root seed
        paired_init: Prepare first-sublayer pairs as R_cop|00>

    """

    def __init__(
        self,
        k: float = 10.0,
        theta: float = -1.0,
        stopping_rule: str = "first_rejected",
        depth: int = 1,
        grid_size: int = 0,
        shots: int = 10_000,
        train_config: Optional[TrainConfig] = None,
        seed: int = 0,
        paired_init: bool = False,
    ):
        """Initialize the solver.

        Args:
        ----
            k: Warm-start steepness, strictly positive
            theta: Copula correlation in [-1, 1]
            stopping_rule: ``first_rejected`` or ``midpoint``
            depth: Layers to train, at least 0
            grid_size: Points per grid axis, at least 0
            shots: Shots of the final measurement, at least 1
            train_config: Training settings (optional, small defaults)
            seed: Root seed
            paired_init: Use the paired initial state

        """
        if stopping_rule not in STOPPING_RULES:
            raise InvalidArgumentError(f"unknown stopping rule {stopping_rule!r}")
        if depth < 0 or grid_size < 0 or shots < 1:
            raise InvalidArgumentError("depth and grid_size must be >= 0 and shots >= 1")
        self.k = k
        self.theta = theta
        self.stopping_rule = stopping_rule
        self.depth = depth
        self.grid_size = grid_size
        self.shots = shots
        self.train_config = train_config or TrainConfig(restarts=3, optimizer_budget=30)
        self.seed = seed
        self.paired_init = paired_init

    @property
    def name(self) -> str:
        """Return the solver name."""
        return "copqaoa"

    @property
    def thread_safe(self) -> bool:
        """Return True; seeds come from the instance, not from call order."""
        return True

    def _initial_layer(
        self, instance: KnapsackInstance, spec: CopulaSpec, pairing: PairingScheme, seed: int
    ) -> Optional[Tuple[float, float]]:
        if self.grid_size == 0:
            return None
        gamma_max = self.train_config.resolved_gamma_range(instance.values)[1]
        gammas = tuple(float(g) for g in np.linspace(0.0, gamma_max, self.grid_size))
        betas = tuple(float(b) for b in np.linspace(0.0, math.pi, self.grid_size))
        grid = grid_search_p1(
            instance, spec, pairing, gammas, betas, seed=seed, paired_init=self.paired_init
        )
        return grid.argmax.gamma, grid.argmax.beta

    def solve(self, instance: KnapsackInstance) -> SolveResult:
        """Sample the trained circuit and keep the best feasible selection.

        Args:
        ----
            instance: The knapsack instance

        Returns:
        -------
            Best feasible sampled selection, or the empty selection when no
            shot is feasible; the Dantzig bound is the upper bound

        """
        seed = derive_seed(self.seed, "copqaoa", instance.instance_id, instance.n)
        spec = warm_start_spec(instance, self.k, self.theta, rule=self.stopping_rule)
        pairing = PairingScheme.ring(instance.n)
        bound = dantzig_bound(instance)
        initial_layer = self._initial_layer(instance, spec, pairing, seed)

        if self.depth > 0:
            # the trace is discarded, so the fractional bound stands in for C*
            params, _ = train_layerwise(
                instance,
                spec,
                pairing,
                self.depth,
                replace(self.train_config, seed=seed),
                initial_layer=initial_layer,
                paired_init=self.paired_init,
                c_star=bound,
            )
        elif initial_layer is not None:
            params = QaoaParams((initial_layer[0],), (initial_layer[1],))
        else:
            params = QaoaParams()

        state = run_circuit(instance, spec, pairing, params, paired_init=self.paired_init)
        samples = state.sample(self.shots, derive_seed(seed, "final", "sample"))
        try:
            _, bitstring = best_feasible(samples, instance)
            selection = Selection.from_string(bitstring)
        except UndefinedMetricError:
            logger.warning(
                "no feasible shot for %s; returning the empty selection", instance.instance_id
            )
            selection = Selection.empty(instance.n)
        value = instance.evaluate(selection.bits)[0]
        result = SolveResult.from_selection(
            instance, selection, self.name, bound <= value, max(bound, value)
        )
        logger.debug("copqaoa on %s: value %.6g", instance.instance_id, result.value)
        return result
