"""Facade running complete, reproducible experiments.

This module composes the generators, solvers, circuit simulator, trainer
and metrics into single runs that write every artifact into one run
directory, together with a manifest that is enough to replay the run.
"""

from __future__ import annotations

import logging
import platform
import time
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, Optional, Tuple, Union

import matplotlib
import numpy as np
import pandas as pd
import scipy

from copula_qaoa.application.config import KNAPSACK_METHODS, ExperimentConfig
from copula_qaoa.application.metrics import (
    build_metrics_report,
    build_metrics_report_exact,
    valid_ratio,
)
from copula_qaoa.application.qaoa_solver import CopulaQaoaSolver
from copula_qaoa.application.training import grid_search_p1, train_layerwise
from copula_qaoa.domain.entities import (
    KnapsackInstance,
    MetricsReport,
    PairingScheme,
    QaoaParams,
    SampleSet,
    ScanPoint,
    UcInstance,
)
from copula_qaoa.domain.errors import (
    ExperimentStageError,
    InvalidArgumentError,
    NonIntegerWeightsError,
    ResourceLimitError,
    UndefinedMetricError,
)
from copula_qaoa.infrastructure.circuits import circuit_gates, run_circuit, warm_start_spec
from copula_qaoa.infrastructure.generators import gen_inverse_strongly_correlated, gen_random_uc
from copula_qaoa.infrastructure.plotting import emit_heatmap_svg
from copula_qaoa.infrastructure.repositories import (
    RunDirectory,
    load_instance,
    load_json,
    load_uc,
    save_depth_metrics,
    save_heatmap_csv,
    save_instance,
    save_samples,
    save_scan,
    save_uc,
)
from copula_qaoa.infrastructure.seeding import derive_seed
from copula_qaoa.infrastructure.solvers import (
    BranchAndBoundSolver,
    get_default_solvers,
    lazy_greedy,
)
from copula_qaoa.infrastructure.statevector import sample_uniform
from copula_qaoa.infrastructure.unit_commitment import (
    BRUTE_FORCE_MAX_UNITS,
    brute_force_uc,
    default_marginal_grid,
    solve_uc_via_scan,
    verify_kkt,
)
from copula_qaoa.protocols.interfaces import KnapsackSolver

logger = logging.getLogger(__name__)

# Largest instance whose report also carries the brute-force baseline
REPORT_BRUTE_FORCE_MAX_ITEMS = 20
# Largest register whose report also carries the exact-distribution metrics
REPORT_EXACT_MAX_QUBITS = 18


@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of one run.

    Attributes
    ----------
        config: Settings the run used
        out: Run directory
        report: Metrics report, None when no metric applies or none is defined
        summary: Method-specific results, as written to the solution or metrics file
        timings: Wall-clock seconds per stage
        artifacts: Names of the files written

    """

    config: ExperimentConfig
    out: Path
    report: Optional[MetricsReport]
    summary: Dict[str, Any]
    timings: Dict[str, float]
    artifacts: Tuple[str, ...]


def package_versions() -> Dict[str, str]:
    """Versions of the interpreter and of every package that shapes the outputs."""
    from copula_qaoa import __version__

    return {
        "copula_qaoa": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "matplotlib": matplotlib.__version__,
    }


def _scan_point_dict(point: ScanPoint) -> Dict[str, Any]:
    return {
        "D": point.d,
        "cost": point.cost if point.feasible else None,
        "feasible": point.feasible,
        "commitment": point.commitment.as_string() if point.commitment else None,
    }


class ExperimentFacade:
    """Facade providing end-to-end experiment runs.

    Attributes
    ----------
        solvers: Knapsack solvers by name

    """

    def __init__(self, solvers: Optional[Dict[str, KnapsackSolver]] = None):
        """Initialize the facade.

        Args:
        ----
            solvers: Knapsack solvers by name (optional, defaults to the built-in set)

        """
        self.solvers = solvers or get_default_solvers()

    @contextmanager
    def _stage(self, name: str, timings: Dict[str, float]) -> Iterator[None]:
        start = time.perf_counter()
        logger.info("stage %s", name)
        try:
            yield
        except ExperimentStageError:
            raise
        except Exception as exc:
            raise ExperimentStageError(name, exc) from exc
        finally:
            timings[name] = time.perf_counter() - start

    def _solver(self, name: str, config: ExperimentConfig) -> KnapsackSolver:
        if name == "bnb" and config.time_budget is not None:
            return BranchAndBoundSolver(config.time_budget)
        if name == "copqaoa" and name not in self.solvers:
            return CopulaQaoaSolver(
                k=config.k,
                theta=config.theta,
                stopping_rule=config.stopping_rule,
                depth=config.depth,
                grid_size=config.grid_size if config.grid else 0,
                shots=config.shots,
                train_config=config.train_config(),
                seed=config.seed,
                paired_init=config.paired_init,
            )
        if name not in self.solvers:
            raise InvalidArgumentError(f"no solver named {name!r}")
        return self.solvers[name]

    def reference_values(
        self, instance: KnapsackInstance, config: ExperimentConfig
    ) -> Tuple[Dict[str, float], float]:
        """Baseline values by method, and the C* used in approximation ratios.

        C* is the exact optimum from dynamic programming, or from
        branch-and-bound when weights are real or the table is too large.
        An unproven branch-and-bound result contributes its upper bound.
        """
        baselines = {"greedy": lazy_greedy(instance).value}
        try:
            exact = self._solver("dp", config).solve(instance)
        except (NonIntegerWeightsError, ResourceLimitError) as exc:
            logger.debug("falling back to branch-and-bound: %s", exc)
            exact = self._solver("bnb", config).solve(instance)
        baselines[exact.method] = exact.value
        if instance.n <= REPORT_BRUTE_FORCE_MAX_ITEMS:
            baselines["brute"] = self._solver("brute", config).solve(instance).value
        if not exact.proven_optimal:
            logger.warning("optimum not proven; C* is the bound %.6g", exact.upper_bound)
        return baselines, exact.upper_bound

    def _metrics(
        self,
        samples: SampleSet,
        instance: KnapsackInstance,
        build: Callable[[], MetricsReport],
    ) -> Tuple[Optional[MetricsReport], Dict[str, Any]]:
        try:
            report = build()
        except UndefinedMetricError as exc:
            logger.warning("metrics undefined: %s", exc)
            return None, {
                "undefined": str(exc),
                "valid_ratio": valid_ratio(samples, instance),
            }
        return report, report.to_dict()

    def run_experiment(self, config: ExperimentConfig) -> ExperimentResult:
        """Run one experiment end to end and write its artifacts.

        Args:
        ----
            config: Settings of the run

        Returns:
        -------
            The run's report, summary and timings

        Raises:
        ------
            ExperimentStageError: If any stage fails; ``stage`` names it

        """
        run = RunDirectory(config.out)
        timings: Dict[str, float] = {}
        logger.info("running %s with seed %d into %s", config.method, config.seed, run.root)

        if config.method == "uc-scan":
            with self._stage("instance", timings):
                uc = self._uc_instance(config, run)
            report, summary = None, self._run_uc_scan(config, uc, run, timings)
        else:
            with self._stage("instance", timings):
                instance = self._knapsack_instance(config, run)
            if config.method in KNAPSACK_METHODS:
                report, summary = self._run_classical(config, instance, run, timings)
            elif config.method == "random":
                report, summary = self._run_random(config, instance, run, timings)
            else:
                report, summary = self._run_copqaoa(config, instance, run, timings)

        artifacts = tuple(run.listing())
        manifest = {
            "config": config.to_dict(),
            "seeds": {
                "root": config.seed,
                "final_sample": derive_seed(config.seed, "final", "sample"),
            },
            "versions": package_versions(),
            "timings": dict(sorted(timings.items())),
            "created": datetime.now(timezone.utc).isoformat(),
            "artifacts": list(artifacts),
        }
        run.write_json(RunDirectory.MANIFEST, manifest)
        return ExperimentResult(
            config, run.root, report, summary, timings, artifacts + (RunDirectory.MANIFEST,)
        )

    def replay_manifest(
        self, path: Union[str, Path], out: Optional[Union[str, Path]] = None
    ) -> ExperimentResult:
        """Rerun the experiment recorded in a manifest.

        When the original instance file is gone, the copy saved in the
        manifest's run directory is used instead.

        Args:
        ----
            path: Manifest file
            out: Run directory of the replay (optional, defaults to the original)

        Returns:
        -------
            Result of the replayed run

        """
        manifest_path = Path(path)
        manifest = load_json(manifest_path)
        config = ExperimentConfig.from_dict(manifest["config"])
        overrides: Dict[str, Any] = {"out": str(out) if out is not None else None}
        if config.instance_path is not None and not Path(config.instance_path).exists():
            name = (
                RunDirectory.UC_INSTANCE if config.method == "uc-scan" else RunDirectory.INSTANCE
            )
            overrides["instance_path"] = str(manifest_path.parent / name)
        recorded = manifest.get("versions", {})
        current = package_versions()
        for package, version in sorted(recorded.items()):
            if current.get(package) != version:
                logger.warning(
                    "%s version differs from the manifest: %s != %s",
                    package, current.get(package), version,
                )
        return self.run_experiment(config.with_overrides(**overrides))

    def _knapsack_instance(self, config: ExperimentConfig, run: RunDirectory) -> KnapsackInstance:
        if config.instance_path is not None:
            instance = load_instance(config.instance_path)
        else:
            instance = gen_inverse_strongly_correlated(config.n, config.seed)
        run.write(RunDirectory.INSTANCE, save_instance, instance)
        logger.info("instance %s with %d items", instance.instance_id, instance.n)
        return instance

    def _uc_instance(self, config: ExperimentConfig, run: RunDirectory) -> UcInstance:
        if config.instance_path is not None:
            uc = load_uc(config.instance_path)
        else:
            uc = gen_random_uc(config.n, config.seed, config.load_factor)
        run.write(RunDirectory.UC_INSTANCE, save_uc, uc)
        logger.info("unit-commitment instance %s with %d units", uc.instance_id, uc.n)
        return uc

    def _run_classical(
        self,
        config: ExperimentConfig,
        instance: KnapsackInstance,
        run: RunDirectory,
        timings: Dict[str, float],
    ) -> Tuple[Optional[MetricsReport], Dict[str, Any]]:
        with self._stage("solve", timings):
            result = self._solver(config.method, config).solve(instance)
        logger.info(
            "%s: value %s, proven optimal %s, %.3fs",
            result.method, result.value, result.proven_optimal, timings["solve"],
        )
        summary = {
            "method": result.method,
            "bitstring": result.selection.as_string(),
            "value": result.value,
            "weight": result.weight,
            "proven_optimal": result.proven_optimal,
            "upper_bound": result.upper_bound,
        }
        with self._stage("metrics", timings):
            samples = SampleSet.from_counts({result.selection.as_string(): 1})
            run.write(RunDirectory.SAMPLES, save_samples, samples)
            run.write_json(RunDirectory.SOLUTION, summary)
            baselines = {"greedy": lazy_greedy(instance).value, result.method: result.value}
            report: Optional[MetricsReport] = None
            if result.upper_bound > 0:
                report, payload = self._metrics(
                    samples,
                    instance,
                    lambda: build_metrics_report(samples, instance, result.upper_bound, baselines),
                )
                run.write_json(RunDirectory.METRICS, payload)
        return report, summary

    def _run_random(
        self,
        config: ExperimentConfig,
        instance: KnapsackInstance,
        run: RunDirectory,
        timings: Dict[str, float],
    ) -> Tuple[Optional[MetricsReport], Dict[str, Any]]:
        with self._stage("sample", timings):
            samples = sample_uniform(
                instance.n, config.shots, derive_seed(config.seed, "final", "sample")
            )
            run.write(RunDirectory.SAMPLES, save_samples, samples)
        with self._stage("metrics", timings):
            baselines, c_star = self.reference_values(instance, config)
            report, payload = self._metrics(
                samples,
                instance,
                lambda: build_metrics_report(samples, instance, c_star, baselines, config.top_k),
            )
            run.write_json(RunDirectory.METRICS, payload)
        return report, payload

    def _run_copqaoa(
        self,
        config: ExperimentConfig,
        instance: KnapsackInstance,
        run: RunDirectory,
        timings: Dict[str, float],
    ) -> Tuple[Optional[MetricsReport], Dict[str, Any]]:
        with self._stage("reference", timings):
            baselines, c_star = self.reference_values(instance, config)
        with self._stage("warm-start", timings):
            spec = warm_start_spec(instance, config.k, config.theta, rule=config.stopping_rule)
            pairing = PairingScheme.ring(instance.n)

        initial_layer: Optional[Tuple[float, float]] = None
        if config.grid:
            with self._stage("grid", timings):
                gammas, betas = config.grid_axes(instance)
                grid = grid_search_p1(
                    instance,
                    spec,
                    pairing,
                    gammas,
                    betas,
                    shots=config.grid_shots,
                    seed=config.seed,
                    paired_init=config.paired_init,
                    workers=config.workers,
                )
                run.write(RunDirectory.HEATMAP_CSV, save_heatmap_csv, grid)
                emit_heatmap_svg(grid, run.path(RunDirectory.HEATMAP_SVG))
                initial_layer = (grid.argmax.gamma, grid.argmax.beta)

        if config.gammas:
            params = QaoaParams(config.gammas, config.betas)
        elif config.depth > 0:
            with self._stage("train", timings):
                params, trace = train_layerwise(
                    instance,
                    spec,
                    pairing,
                    config.depth,
                    config.train_config(),
                    initial_layer=initial_layer,
                    paired_init=config.paired_init,
                    workers=config.workers,
                    c_star=c_star,
                    baselines=baselines,
                )
                run.write_json(RunDirectory.TRACE, trace.to_dict())
                run.write(RunDirectory.DEPTH_METRICS, save_depth_metrics, trace)
        elif initial_layer is not None:
            params = QaoaParams((initial_layer[0],), (initial_layer[1],))
        else:
            params = QaoaParams()

        with self._stage("sample", timings):
            state = run_circuit(instance, spec, pairing, params, paired_init=config.paired_init)
            samples = state.sample(config.shots, derive_seed(config.seed, "final", "sample"))
            run.write(RunDirectory.SAMPLES, save_samples, samples)
            run.write_json(
                RunDirectory.CIRCUIT,
                {
                    "probs": list(spec.probs),
                    "theta": spec.theta,
                    "pairing": pairing.to_list(),
                    "gammas": list(params.gammas),
                    "betas": list(params.betas),
                    "paired_init": config.paired_init,
                    "gates": circuit_gates(instance, spec, pairing, params, config.paired_init),
                },
            )

        with self._stage("metrics", timings):
            report, payload = self._metrics(
                samples,
                instance,
                lambda: build_metrics_report(samples, instance, c_star, baselines, config.top_k),
            )
            if instance.n <= REPORT_EXACT_MAX_QUBITS:
                try:
                    exact = build_metrics_report_exact(
                        instance, state.probabilities(), c_star, baselines, config.shots
                    )
                    payload["exact"] = exact.to_dict()
                except UndefinedMetricError as exc:
                    logger.warning("exact metrics undefined: %s", exc)
            payload["depth"] = params.depth
            run.write_json(RunDirectory.METRICS, payload)
        return report, payload

    def _run_uc_scan(
        self,
        config: ExperimentConfig,
        uc: UcInstance,
        run: RunDirectory,
        timings: Dict[str, float],
    ) -> Dict[str, Any]:
        with self._stage("scan", timings):
            grid = default_marginal_grid(uc, config.d_points)
            scan = solve_uc_via_scan(
                uc,
                grid,
                self._solver(config.scan_solver, config),
                config.scan_mode,
                refine=config.scan_refine,
                workers=config.workers,
            )
            run.write(RunDirectory.SCAN, save_scan, scan.curve)

        with self._stage("verify", timings):
            best = scan.best
            summary: Dict[str, Any] = {
                "commitment": best.commitment.as_string(),
                "dispatch": list(best.dispatch.powers),
                "cost": best.cost,
                "best_D": scan.best_d,
                "lambda": best.marginal.value,
                "kkt_satisfied": verify_kkt(
                    uc, best.commitment, best.dispatch, best.marginal.value
                ),
                "refinements": [_scan_point_dict(p) for p in scan.refinements],
            }
            lowest = int(np.argmin([p.cost for p in scan.curve]))
            summary["interior_minimum"] = 0 < lowest < len(scan.curve) - 1
            if uc.n <= BRUTE_FORCE_MAX_UNITS:
                exact = brute_force_uc(uc)
                summary["brute_force_cost"] = exact.cost
                summary["relative_gap"] = (best.cost - exact.cost) / exact.cost
            run.write_json(RunDirectory.SOLUTION, summary)
        logger.info("uc-scan: cost %.6g at D=%.6g", best.cost, scan.best_d)
        return summary
