"""Layer-wise training and the depth-1 grid search.

Training grows the circuit one layer at a time. At depth ``l`` only the new
pair (gamma_l, beta_l) is optimized; every earlier layer stays frozen at the
value chosen for it. The objective is the feasibility-masked mean value,
computed exactly from the statevector for small registers or estimated from
seeded shots otherwise.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar

from copula_qaoa.application.metrics import (
    REFERENCE_SHOTS,
    approximation_ratio,
    approximation_ratio_exact,
    baseline_ratios,
    best_feasible,
    best_feasible_exact,
    valid_ratio,
    valid_ratio_exact,
)
from copula_qaoa.domain.entities import (
    CopulaSpec,
    DepthQuality,
    GridCell,
    GridSearchResult,
    KnapsackInstance,
    LayerRecord,
    PairingScheme,
    QaoaParams,
    TrainConfig,
    TrainTrace,
)
from copula_qaoa.domain.errors import InvalidArgumentError, UndefinedMetricError
from copula_qaoa.infrastructure.circuits import (
    apply_copula_mixer,
    apply_cost_layer,
    objective_from_probabilities,
    objective_from_samples,
    run_circuit,
)
from copula_qaoa.infrastructure.optimizers import LocalSearchResult, local_optimize
from copula_qaoa.infrastructure.seeding import Label, derive_seed, make_rng
from copula_qaoa.infrastructure.solvers import lazy_greedy, solve_branch_bound
from copula_qaoa.infrastructure.statevector import StateVector
from copula_qaoa.protocols.interfaces import Interval, Objective2D

logger = logging.getLogger(__name__)

OBJECTIVE_MODES = ("exact", "sampled")

Measurement = Tuple[float, float, float]
T = TypeVar("T")
R = TypeVar("R")


def resolve_mode(mode: str, n: int, exact_qubit_limit: int = 18) -> str:
    """Turn ``"auto"`` into ``"exact"`` or ``"sampled"`` by register size."""
    if mode == "auto":
        return "exact" if n <= exact_qubit_limit else "sampled"
    if mode not in OBJECTIVE_MODES:
        raise InvalidArgumentError(f"unknown objective mode {mode!r}")
    return mode


class LayerObjective:
    """Objective of one new layer on top of a frozen circuit prefix.

    The state after the frozen layers is simulated once; each evaluation
    copies it and applies only the new cost and mixer layers.
    """

    def __init__(
        self,
        instance: KnapsackInstance,
        spec: CopulaSpec,
        pairing: PairingScheme,
        frozen: QaoaParams,
        mode: str = "exact",
        shots: int = 10_000,
        seed: int = 0,
        labels: Tuple[Label, ...] = (),
        paired_init: bool = False,
        reference_shots: int = REFERENCE_SHOTS,
    ):
        """Simulate the frozen prefix once."""
        self.instance = instance
        self.spec = spec
        self.pairing = pairing
        self.mode = resolve_mode(mode, instance.n)
        self.shots = shots
        self.seed = seed
        self.labels = labels
        self.reference_shots = reference_shots
        self.prefix = run_circuit(instance, spec, pairing, frozen, paired_init=paired_init)

    def state(self, gamma: float, beta: float) -> StateVector:
        """Statevector with the new layer (gamma, beta) appended."""
        state = self.prefix.copy()
        apply_cost_layer(state, gamma, self.instance.values)
        apply_copula_mixer(state, beta, self.spec, self.pairing)
        return state

    def evaluate(self, gamma: float, beta: float, *labels: Label) -> float:
        """Objective at (gamma, beta); ``labels`` pick the shot seed in sampled mode."""
        state = self.state(gamma, beta)
        if self.mode == "exact":
            return objective_from_probabilities(self.instance, state.probabilities())
        samples = state.sample(self.shots, derive_seed(self.seed, *self.labels, *labels))
        return objective_from_samples(self.instance, samples)

    def evaluator(self, restart: int) -> Objective2D:
        """Two-argument objective whose shot seeds are derived by evaluation counter."""
        counter = [0]

        def objective(gamma: float, beta: float) -> float:
            counter[0] += 1
            return self.evaluate(gamma, beta, "restart", restart, "eval", counter[0])

        return objective

    def measure(self, gamma: float, beta: float, *labels: Label) -> Measurement:
        """Return ``(objective, best observed feasible value, valid ratio)``."""
        state = self.state(gamma, beta)
        if self.mode == "exact":
            probabilities = state.probabilities()
            objective = objective_from_probabilities(self.instance, probabilities)
            try:
                best, _ = best_feasible_exact(self.instance, probabilities, self.reference_shots)
            except UndefinedMetricError:
                best = 0.0
            return objective, best, valid_ratio_exact(self.instance, probabilities)
        samples = state.sample(self.shots, derive_seed(self.seed, *self.labels, "measure", *labels))
        try:
            best, _ = best_feasible(samples, self.instance)
        except UndefinedMetricError:
            best = 0.0
        return (
            objective_from_samples(self.instance, samples),
            best,
            valid_ratio(samples, self.instance),
        )

    def quality(
        self,
        gamma: float,
        beta: float,
        c_star: float,
        baselines: Mapping[str, float],
        *labels: Label,
    ) -> DepthQuality:
        """Measure like :meth:`measure` and add the ratios to ``c_star`` and ``baselines``.

        Shots are drawn from the same seed path as :meth:`measure`, so the
        best value and valid ratio agree with it.
        """
        state = self.state(gamma, beta)
        ratio: Optional[float] = None
        best: Optional[float] = None
        if self.mode == "exact":
            probabilities = state.probabilities()
            objective = objective_from_probabilities(self.instance, probabilities)
            valid = valid_ratio_exact(self.instance, probabilities)
            if c_star > 0 and valid > 0:
                ratio = approximation_ratio_exact(self.instance, probabilities, c_star)
            try:
                best, _ = best_feasible_exact(self.instance, probabilities, self.reference_shots)
            except UndefinedMetricError:
                pass
        else:
            samples = state.sample(
                self.shots, derive_seed(self.seed, *self.labels, "measure", *labels)
            )
            objective = objective_from_samples(self.instance, samples)
            valid = valid_ratio(samples, self.instance)
            if c_star > 0 and valid > 0:
                ratio = approximation_ratio(samples, self.instance, c_star)
            if valid > 0:
                best, _ = best_feasible(samples, self.instance)
        if best is None:
            return DepthQuality(objective, 0.0, valid, ratio)
        return DepthQuality(objective, best, valid, ratio, baseline_ratios(best, baselines))


def _restart_starts(
    config: TrainConfig,
    depth: int,
    gamma_range: Interval,
    initial_layer: Optional[Tuple[float, float]],
) -> List[Tuple[float, float]]:
    starts = [(0.0, 0.0)]
    if depth == 1 and initial_layer is not None:
        starts.append((float(initial_layer[0]), float(initial_layer[1])))
    while len(starts) < config.restarts:
        rng = make_rng(config.seed, "train", depth, "start", len(starts))
        starts.append(
            (
                float(rng.uniform(*gamma_range)),
                float(rng.uniform(*config.beta_range)),
            )
        )
    return starts


def _map(function: Callable[[T], R], items: Sequence[T], workers: int) -> List[R]:
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(function, items))
    return [function(item) for item in items]


def _train_layer(
    objective: LayerObjective,
    starts: Sequence[Tuple[float, float]],
    config: TrainConfig,
    depth: int,
    step: Tuple[float, float],
    workers: int,
) -> Tuple[int, LocalSearchResult]:
    def run(restart: int) -> LocalSearchResult:
        return local_optimize(
            objective.evaluator(restart),
            starts[restart],
            config.optimizer_budget,
            seed=derive_seed(config.seed, "train", depth, "simplex", restart),
            step=step,
        )

    results = _map(run, list(range(len(starts))), workers)
    winner = 0
    for restart, result in enumerate(results):
        logger.debug("depth %d restart %d: objective %.6g", depth, restart, result.value)
        if result.value > results[winner].value:
            winner = restart
    return winner, results[winner]


def train_layerwise(
    instance: KnapsackInstance,
    spec: CopulaSpec,
    pairing: PairingScheme,
    max_depth: int,
    config: Optional[TrainConfig] = None,
    initial_layer: Optional[Tuple[float, float]] = None,
    paired_init: bool = False,
    workers: int = 1,
    c_star: Optional[float] = None,
    baselines: Optional[Mapping[str, float]] = None,
) -> Tuple[QaoaParams, TrainTrace]:
    """Train a copula-QAOA circuit layer by layer.

    Restart 0 of every depth starts at (0, 0), which reproduces the previous
    depth's state, so in exact mode the chosen objective never decreases
    with depth. The other restarts start uniformly at random in the
    configured ranges. The best restart wins; ties go to the lowest index.

    The depth-0 state and every trained depth are also measured for their
    approximation ratio and best-value ratios, so the trace holds the
    per-depth quality curves.

    Args:
    ----
        instance: Knapsack instance
        spec: Warm-start marginals and copula correlation
        pairing: Mixer pairing
        max_depth: Number of layers to train, at least 1
        config: Restarts, budgets, ranges and seed
        initial_layer: Extra depth-1 start, e.g. the grid-search argmax
        paired_init: Use the paired initial state
        workers: Threads running restarts concurrently
        c_star: Optimum for the approximation ratio; defaults to branch-and-bound
        baselines: Values the best ratios divide by; defaults to lazy greedy

    Returns:
    -------
        The trained parameters and the per-depth trace

    """
    if max_depth < 1:
        raise InvalidArgumentError(f"max_depth must be >= 1, got {max_depth}")
    config = config or TrainConfig()
    mode = resolve_mode(config.objective_mode, instance.n, config.exact_qubit_limit)
    gamma_range = config.resolved_gamma_range(instance.values)
    params = QaoaParams()
    if c_star is None:
        c_star = solve_branch_bound(instance).upper_bound
    references: Dict[str, float] = (
        dict(baselines) if baselines is not None else {"greedy": lazy_greedy(instance).value}
    )

    baseline = LayerObjective(
        instance, spec, pairing, params, mode, config.shots_per_eval, config.seed,
        ("train", "baseline"), paired_init,
    )
    baseline_objective = baseline.evaluate(0.0, 0.0)
    baseline_quality = baseline.quality(0.0, 0.0, c_star, references)
    beta_low, beta_high = config.beta_range
    step = ((gamma_range[1] - gamma_range[0]) / 10, (beta_high - beta_low) / 10)
    records: List[LayerRecord] = []

    for depth in range(1, max_depth + 1):
        objective = LayerObjective(
            instance, spec, pairing, params, mode, config.shots_per_eval, config.seed,
            ("train", depth), paired_init,
        )
        starts = _restart_starts(config, depth, gamma_range, initial_layer)
        winner, chosen = _train_layer(objective, starts, config, depth, step, workers)
        gamma, beta = chosen.point
        quality = objective.quality(gamma, beta, c_star, references)
        records.append(
            LayerRecord(
                depth=depth,
                gamma=gamma,
                beta=beta,
                objective=chosen.value,
                best_value=quality.best_value,
                valid_ratio=quality.valid_ratio,
                history=chosen.history,
                restart=winner,
                frozen=params,
                approximation_ratio=quality.approximation_ratio,
                best_ratios=quality.best_ratios,
            )
        )
        logger.info(
            "depth %d: gamma=%.6g beta=%.6g objective=%.6g (restart %d)",
            depth, gamma, beta, chosen.value, winner,
        )
        params = params.with_layer(gamma, beta)

    trace = TrainTrace(
        baseline_objective, tuple(records), mode, baseline_quality, c_star, references
    )
    return params, trace


def grid_search_p1(
    instance: KnapsackInstance,
    spec: CopulaSpec,
    pairing: PairingScheme,
    gammas: Sequence[float],
    betas: Sequence[float],
    shots: Optional[int] = None,
    seed: int = 0,
    reference_shots: int = REFERENCE_SHOTS,
    paired_init: bool = False,
    workers: int = 1,
) -> GridSearchResult:
    """Measure the depth-1 circuit on every (gamma, beta) cell of a grid.

    With ``shots=None`` every cell is measured exactly and the result does
    not depend on ``seed``; "best observed" then means the best feasible
    value whose probability is at least ``1 / reference_shots``.

    Args:
    ----
        instance: Knapsack instance
        spec: Warm-start marginals and copula correlation
        pairing: Mixer pairing
        gammas: Gamma axis, non-empty
        betas: Beta axis, non-empty
        shots: Shots per cell, or None for exact measurement
        seed: Root seed of the per-cell shot seeds
        reference_shots: Shot count defining the exact observation floor
        paired_init: Use the paired initial state
        workers: Threads measuring cells concurrently

    Returns:
    -------
        Both landscapes, the (0, 0) baseline and the argmax cell

    """
    if not gammas or not betas:
        raise InvalidArgumentError("grid axes must be non-empty")
    gammas = tuple(float(g) for g in gammas)
    betas = tuple(float(b) for b in betas)
    mode = "exact" if shots is None else "sampled"
    objective = LayerObjective(
        instance, spec, pairing, QaoaParams(), mode, shots or 1, seed, ("grid",),
        paired_init, reference_shots,
    )
    indices = [(gi, bi) for gi in range(len(gammas)) for bi in range(len(betas))]

    def measure(index: Tuple[int, int]) -> GridCell:
        gamma, beta = gammas[index[0]], betas[index[1]]
        mean, best, valid = objective.measure(gamma, beta, *index)
        return GridCell(gamma, beta, best, mean, valid)

    cells = tuple(_map(measure, indices, workers))
    origin = [c for c in cells if c.gamma == 0.0 and c.beta == 0.0]
    if origin:
        baseline_value = origin[0].best_value
    else:
        baseline_value = objective.measure(0.0, 0.0, "baseline")[1]
    argmax = min(cells, key=lambda c: (-c.best_value, c.gamma, c.beta))
    result = GridSearchResult(gammas, betas, cells, baseline_value, argmax)
    logger.info(
        "grid %dx%d: best %.6g at gamma=%.6g beta=%.6g, %d cells beat the baseline %.6g",
        len(gammas), len(betas), argmax.best_value, argmax.gamma, argmax.beta,
        len(result.red_dots), baseline_value,
    )
    return result
