"""Solution-quality metrics over measured samples or exact distributions.

Sample-based metrics read a SampleSet; the ``*_exact`` variants read a
probability vector indexed by little-endian basis state, as returned by
``StateVector.probabilities()``.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from copula_qaoa.domain.entities import KnapsackInstance, MetricsReport, SampleSet, Selection
from copula_qaoa.domain.errors import InvalidArgumentError, UndefinedMetricError
from copula_qaoa.infrastructure.circuits import basis_table
from copula_qaoa.infrastructure.statevector import index_to_bitstring

logger = logging.getLogger(__name__)

REFERENCE_SHOTS = 100_000


def feasible_outcomes(
    samples: SampleSet, instance: KnapsackInstance
) -> List[Tuple[str, float, int]]:
    """Feasible ``(bitstring, value, count)`` triples, in bitstring order."""
    outcomes = []
    for bitstring, count in samples.counts.items():
        value, _, feasible = instance.evaluate(Selection.from_string(bitstring).bits)
        if feasible and count > 0:
            outcomes.append((bitstring, value, count))
    return outcomes


def valid_ratio(samples: SampleSet, instance: KnapsackInstance) -> float:
    """Fraction of shots whose bitstring is feasible."""
    if samples.shots < 1:
        raise InvalidArgumentError("valid ratio needs at least one shot")
    return sum(count for _, _, count in feasible_outcomes(samples, instance)) / samples.shots


def approximation_ratio(
    samples: SampleSet,
    instance: KnapsackInstance,
    c_star: float,
    top_k: Optional[int] = None,
) -> float:
    """Feasible count-weighted mean value divided by ``c_star``.

    With ``top_k`` only the ``top_k`` highest-value feasible shots count,
    with multiplicity; the last bitstring may contribute part of its count.

    Raises
    ------
        UndefinedMetricError: If no shot is feasible

    """
    if c_star <= 0:
        raise InvalidArgumentError(f"c_star must be > 0, got {c_star}")
    if top_k is not None and top_k < 1:
        raise InvalidArgumentError(f"top_k must be >= 1, got {top_k}")
    outcomes = feasible_outcomes(samples, instance)
    if not outcomes:
        raise UndefinedMetricError("approximation ratio is undefined without a feasible sample")
    if top_k is not None:
        outcomes = sorted(outcomes, key=lambda o: (-o[1], o[0]))
    mass = 0.0
    used = 0
    for _, value, count in outcomes:
        take = count if top_k is None else min(count, top_k - used)
        if take <= 0:
            break
        mass += value * take
        used += take
    return mass / (used * c_star)


def best_feasible(samples: SampleSet, instance: KnapsackInstance) -> Tuple[float, str]:
    """Highest feasible sampled value and its bitstring (smallest bitstring on ties)."""
    outcomes = feasible_outcomes(samples, instance)
    if not outcomes:
        raise UndefinedMetricError("no feasible sample")
    bitstring, value, _ = min(outcomes, key=lambda o: (-o[1], o[0]))
    return value, bitstring


def best_ratio_report(
    samples: SampleSet, instance: KnapsackInstance, baselines: Mapping[str, float]
) -> Dict[str, float]:
    """Best feasible sampled value divided by each baseline value.

    Baselines with a non-positive value have no meaningful ratio and are
    left out.
    """
    if "greedy" not in baselines:
        raise InvalidArgumentError("baselines must include the greedy value")
    best, _ = best_feasible(samples, instance)
    return baseline_ratios(best, baselines)


def baseline_ratios(best: float, baselines: Mapping[str, float]) -> Dict[str, float]:
    """``best`` divided by every positive baseline value."""
    ratios = {}
    for method, value in sorted(baselines.items()):
        if value > 0:
            ratios[method] = best / value
        else:
            logger.warning("baseline %s has value %s; ratio omitted", method, value)
    return ratios


def build_metrics_report(
    samples: SampleSet,
    instance: KnapsackInstance,
    c_star: float,
    baselines: Mapping[str, float],
    top_k: Optional[int] = None,
) -> MetricsReport:
    """Assemble every sample-based metric into one report."""
    best, bitstring = best_feasible(samples, instance)
    return MetricsReport(
        best_value=best,
        best_bitstring=bitstring,
        approximation_ratio=approximation_ratio(samples, instance, c_star, top_k),
        valid_ratio=valid_ratio(samples, instance),
        top_k_used=top_k,
        baselines=dict(baselines),
        best_ratios=best_ratio_report(samples, instance, baselines),
    )


def _check_probabilities(instance: KnapsackInstance, probabilities: np.ndarray) -> None:
    if len(probabilities) != 1 << instance.n:
        raise InvalidArgumentError(
            f"probability vector of length {len(probabilities)} for {instance.n} items"
        )


def valid_ratio_exact(instance: KnapsackInstance, probabilities: np.ndarray) -> float:
    """Feasible probability mass."""
    _check_probabilities(instance, probabilities)
    _, _, feasible = basis_table(instance)
    return float(probabilities[feasible].sum())


def approximation_ratio_exact(
    instance: KnapsackInstance, probabilities: np.ndarray, c_star: float
) -> float:
    """Exact counterpart of :func:`approximation_ratio` without top-k."""
    if c_star <= 0:
        raise InvalidArgumentError(f"c_star must be > 0, got {c_star}")
    _check_probabilities(instance, probabilities)
    values, _, feasible = basis_table(instance)
    mass = float(probabilities[feasible].sum())
    if mass <= 0:
        raise UndefinedMetricError("no feasible probability mass")
    return float(np.dot(probabilities[feasible], values[feasible])) / (mass * c_star)


def best_feasible_exact(
    instance: KnapsackInstance,
    probabilities: np.ndarray,
    reference_shots: int = REFERENCE_SHOTS,
) -> Tuple[float, str]:
    """Best feasible value among states likely to show up in ``reference_shots`` shots.

    A state counts as observed when its probability is at least
    ``1 / reference_shots``.
    """
    _check_probabilities(instance, probabilities)
    values, _, feasible = basis_table(instance)
    observed = feasible & (probabilities >= 1.0 / reference_shots)
    if not observed.any():
        raise UndefinedMetricError("no feasible state above the observation floor")
    candidates = np.flatnonzero(observed)
    top = values[candidates].max()
    winners = [index_to_bitstring(int(i), instance.n) for i in candidates if values[i] == top]
    return float(top), min(winners)


def build_metrics_report_exact(
    instance: KnapsackInstance,
    probabilities: np.ndarray,
    c_star: float,
    baselines: Mapping[str, float],
    reference_shots: int = REFERENCE_SHOTS,
) -> MetricsReport:
    """Assemble every exact metric into one report."""
    if "greedy" not in baselines:
        raise InvalidArgumentError("baselines must include the greedy value")
    best, bitstring = best_feasible_exact(instance, probabilities, reference_shots)
    return MetricsReport(
        best_value=best,
        best_bitstring=bitstring,
        approximation_ratio=approximation_ratio_exact(instance, probabilities, c_star),
        valid_ratio=valid_ratio_exact(instance, probabilities),
        top_k_used=None,
        baselines=dict(baselines),
        best_ratios=baseline_ratios(best, baselines),
    )
