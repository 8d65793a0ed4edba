"""Application services for the copula-QAOA toolkit."""

from copula_qaoa.application.config import ExperimentConfig, load_experiment_config
from copula_qaoa.application.facades import ExperimentFacade, ExperimentResult
from copula_qaoa.application.training import grid_search_p1, train_layerwise

__all__ = [
    "ExperimentConfig",
    "load_experiment_config",
    "ExperimentFacade",
    "ExperimentResult",
    "grid_search_p1",
    "train_layerwise",
]
