"""Common fixtures for pytest across the test suite."""

import pytest

from copula_qaoa.application.facades import ExperimentFacade
from copula_qaoa.domain.entities import (
    KnapsackInstance,
    PairingScheme,
    UcInstance,
    UcUnit,
)
from copula_qaoa.infrastructure.circuits import warm_start_spec
from copula_qaoa.infrastructure.repositories import save_instance, save_uc


@pytest.fixture()
def classic_instance():
    """Return the three-item textbook instance: greedy 160, optimum 220."""
    return KnapsackInstance.from_pairs([(60, 10), (100, 20), (120, 30)], 50, "classic")


@pytest.fixture()
def small_instance():
    """Return a six-item integer instance small enough for exact simulation."""
    return KnapsackInstance.from_pairs(
        [(12, 7), (9, 5), (14, 9), (7, 4), (10, 8), (5, 2)], 17, "small"
    )


@pytest.fixture()
def uc_instance():
    """Return a three-unit unit-commitment instance."""
    units = (
        UcUnit(10.0, 1.0, 0.05, 10.0, 60.0),
        UcUnit(20.0, 0.8, 0.1, 10.0, 50.0),
        UcUnit(15.0, 1.2, 0.02, 5.0, 40.0),
    )
    return UcInstance(units, 70.0, "uc3")


@pytest.fixture()
def spec(small_instance):
    """Return the warm-start copula spec of ``small_instance``."""
    return warm_start_spec(small_instance, k=5.0, theta=-1.0)


@pytest.fixture()
def pairing(small_instance):
    """Return the ring pairing of ``small_instance``."""
    return PairingScheme.ring(small_instance.n)


@pytest.fixture()
def facade():
    """Return an ExperimentFacade with the default solvers."""
    return ExperimentFacade()


@pytest.fixture()
def instance_file(tmp_path, small_instance):
    """Return the path of ``small_instance`` written in the text format."""
    path = tmp_path / "small.txt"
    save_instance(small_instance, path)
    return path


@pytest.fixture()
def uc_file(tmp_path, uc_instance):
    """Return the path of ``uc_instance`` written in the text format."""
    path = tmp_path / "uc3.txt"
    save_uc(uc_instance, path)
    return path
