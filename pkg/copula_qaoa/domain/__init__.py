"""Domain entities and errors of the copula-QAOA toolkit."""

from copula_qaoa.domain.entities import (
    Commitment,
    CopulaSpec,
    DepthQuality,
    Dispatch,
    GridCell,
    GridSearchResult,
    Item,
    KnapsackInstance,
    LayerRecord,
    MarginalParam,
    MetricsReport,
    PairingScheme,
    QaoaParams,
    SampleSet,
    ScanPoint,
    ScanResult,
    Selection,
    SolveResult,
    TrainConfig,
    TrainTrace,
    UcInstance,
    UcSolution,
    UcUnit,
)

__all__ = [
    "Commitment",
    "CopulaSpec",
    "DepthQuality",
    "Dispatch",
    "GridCell",
    "GridSearchResult",
    "Item",
    "KnapsackInstance",
    "LayerRecord",
    "MarginalParam",
    "MetricsReport",
    "PairingScheme",
    "QaoaParams",
    "SampleSet",
    "ScanPoint",
    "ScanResult",
    "Selection",
    "SolveResult",
    "TrainConfig",
    "TrainTrace",
    "UcInstance",
    "UcSolution",
    "UcUnit",
]
