"""Copula QAOA - warm-started quantum optimization for knapsack and unit commitment.

This package reduces single-period unit commitment to 1D knapsack, generates
hard knapsack instances, solves them classically, and simulates the
copula-QAOA circuit family with layer-wise training and benchmark metrics.
"""

from copula_qaoa.application.facades import ExperimentFacade
from copula_qaoa.domain.entities import (
    CopulaSpec,
    KnapsackInstance,
    PairingScheme,
    QaoaParams,
    SampleSet,
    UcInstance,
)

__version__ = "0.1.0"

__all__ = [
    "ExperimentFacade",
    "CopulaSpec",
    "KnapsackInstance",
    "PairingScheme",
    "QaoaParams",
    "SampleSet",
    "UcInstance",
]
