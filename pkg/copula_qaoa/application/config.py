"""Experiment configuration.

An ExperimentConfig fully determines a run: together with the package
versions recorded in the manifest it is all a replay needs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from copula_qaoa.domain.entities import KnapsackInstance, TrainConfig
from copula_qaoa.domain.errors import InvalidArgumentError
from copula_qaoa.infrastructure.repositories import load_json
from copula_qaoa.infrastructure.solvers import STOPPING_RULES
from copula_qaoa.infrastructure.unit_commitment import SCAN_MODES

KNAPSACK_METHODS = ("greedy", "dp", "bnb", "brute")
METHODS = KNAPSACK_METHODS + ("random", "copqaoa", "uc-scan")
SCAN_SOLVERS = KNAPSACK_METHODS + ("copqaoa",)
OBJECTIVE_MODES = ("auto", "exact", "sampled")


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one experiment run.

    Attributes
    ----------
        method: One of ``greedy``, ``dp``, ``bnb``, ``brute``, ``random``,
            ``copqaoa`` or ``uc-scan``
        seed: Root seed; every random draw of the run derives from it
        out: Run directory
        instance_path: Instance file to load; None generates one
        n: Items (or units, for ``uc-scan``) of a generated instance
        load_factor: Load over total maximum output of a generated UC instance
        shots: Shots of the final measurement
        k: Warm-start steepness
        theta: Copula correlation
        stopping_rule: ``first_rejected`` or ``midpoint``
        paired_init: Prepare first-sublayer pairs as R_cop|00>
        gammas: Fixed cost angles; when given, no training happens
        betas: Fixed mixer angles, same length as ``gammas``
        depth: Layers to train when no fixed angles are given
        grid: Run the depth-1 grid search first; its argmax seeds training
        grid_size: Points per grid axis
        gamma_max: Upper end of the gamma axis; None uses pi / max value
        beta_max: Upper end of the beta axis
        grid_shots: Shots per grid cell; None measures cells exactly
        restarts: Training restarts per layer
        shots_per_eval: Shots per sampled training evaluation
        optimizer_budget: Evaluations per restart
        objective_mode: ``auto``, ``exact`` or ``sampled``
        top_k: Top-k cutoff of the approximation ratio
        d_points: Marginal-cost grid size of ``uc-scan``
        scan_solver: Knapsack solver used inside ``uc-scan``, ``copqaoa`` included
        scan_mode: ``redispatch`` or ``marginal``
        scan_refine: Bisect commitment changes and revisit each commitment's lambda
        time_budget: Branch-and-bound time budget in seconds
        workers: Threads for restarts, grid cells and scan points

    """

    method: str
    seed: int
    out: str = "runs/run"
    instance_path: Optional[str] = None
    n: int = 16
    load_factor: float = 0.5
    shots: int = 100_000
    k: float = 10.0
    theta: float = -1.0
    stopping_rule: str = "first_rejected"
    paired_init: bool = False
    gammas: Tuple[float, ...] = ()
    betas: Tuple[float, ...] = ()
    depth: int = 0
    grid: bool = False
    grid_size: int = 32
    gamma_max: Optional[float] = None
    beta_max: float = math.pi
    grid_shots: Optional[int] = None
    restarts: int = 20
    shots_per_eval: int = 10_000
    optimizer_budget: int = 60
    objective_mode: str = "auto"
    top_k: Optional[int] = None
    d_points: int = 200
    scan_solver: str = "bnb"
    scan_mode: str = "redispatch"
    scan_refine: bool = True
    time_budget: Optional[float] = None
    workers: int = 1

    def __post_init__(self) -> None:
        """Validate choices and sizes."""
        if self.method not in METHODS:
            raise InvalidArgumentError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise InvalidArgumentError(f"seed must be an integer, got {self.seed!r}")
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas):
            raise InvalidArgumentError("gammas and betas must have the same length")
        if self.n < 1 or self.shots < 1 or self.grid_size < 1 or self.d_points < 1:
            raise InvalidArgumentError("n, shots, grid_size and d_points must be >= 1")
        if self.depth < 0:
            raise InvalidArgumentError(f"depth must be >= 0, got {self.depth}")
        if self.stopping_rule not in STOPPING_RULES:
            raise InvalidArgumentError(f"unknown stopping rule {self.stopping_rule!r}")
        if self.objective_mode not in OBJECTIVE_MODES:
            raise InvalidArgumentError(f"unknown objective mode {self.objective_mode!r}")
        if self.scan_mode not in SCAN_MODES:
            raise InvalidArgumentError(f"unknown scan mode {self.scan_mode!r}")
        if self.scan_solver not in SCAN_SOLVERS:
            raise InvalidArgumentError(f"unknown scan solver {self.scan_solver!r}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ExperimentConfig:
        """Build from a mapping, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {', '.join(unknown)}")
        missing = sorted(name for name in ("method", "seed") if name not in data)
        if missing:
            raise InvalidArgumentError(f"missing config keys: {', '.join(missing)}")
        values = dict(data)
        for name in ("gammas", "betas"):
            if name in values:
                values[name] = tuple(values[name])
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly representation accepted by :meth:`from_dict`."""
        data = asdict(self)
        data["gammas"] = list(self.gammas)
        data["betas"] = list(self.betas)
        return data

    def with_overrides(self, **overrides: Any) -> ExperimentConfig:
        """Copy with the non-None ``overrides`` applied."""
        data = self.to_dict()
        data.update({key: value for key, value in overrides.items() if value is not None})
        return ExperimentConfig.from_dict(data)

    def train_config(self) -> TrainConfig:
        """Training settings derived from this config."""
        return TrainConfig(
            restarts=self.restarts,
            shots_per_eval=self.shots_per_eval,
            optimizer_budget=self.optimizer_budget,
            seed=self.seed,
            objective_mode=self.objective_mode,
        )

    def grid_axes(self, instance: KnapsackInstance) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        """Gamma and beta axes of the grid search, both starting at 0."""
        if self.gamma_max is None:
            gamma_max = self.train_config().resolved_gamma_range(instance.values)[1]
        else:
            gamma_max = self.gamma_max
        gammas = tuple(float(g) for g in np.linspace(0.0, gamma_max, self.grid_size))
        betas = tuple(float(b) for b in np.linspace(0.0, self.beta_max, self.grid_size))
        return gammas, betas


def load_experiment_config(
    path: Union[str, Path], overrides: Optional[Mapping[str, Any]] = None
) -> ExperimentConfig:
    """Read a JSON config file; non-None ``overrides`` win over file values."""
    data = load_json(path)
    if not isinstance(data, dict):
        raise InvalidArgumentError(f"config file {path} must hold a JSON object")
    data.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return ExperimentConfig.from_dict(data)
