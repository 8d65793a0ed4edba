"""Exception hierarchy for the copula-QAOA toolkit.

Every error raised on purpose by the package derives from CopulaQaoaError so
callers (the CLI in particular) can catch one type. Subclasses also inherit
from the closest builtin so that ``except ValueError`` style handling keeps
working for argument errors.
"""

from __future__ import annotations

from typing import Optional


class CopulaQaoaError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(CopulaQaoaError, ValueError):
    """An argument or constructed value violates a documented invariant."""


class InstanceParseError(InvalidArgumentError):
    """An instance file could not be parsed.

    Attributes
    ----------
        line: 1-based line number in the source file, if known
        field: Name of the offending field, if known

    """

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        """Build the error and prefix the message with its location."""
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field


class NonIntegerWeightsError(InvalidArgumentError):
    """Dynamic programming was asked to solve an instance with real weights."""


class ResourceLimitError(CopulaQaoaError, RuntimeError):
    """A configured work, memory or size cap would be exceeded."""


class InfeasibleError(CopulaQaoaError):
    """No feasible solution exists for the requested problem."""


class InfeasibleAtMarginalError(InfeasibleError):
    """Dispatch at the given marginal cost cannot cover the load."""


class DemandInfeasibleError(InfeasibleError):
    """Committed units cannot reach the load even at maximum output."""


class MinimumGenerationError(InfeasibleError):
    """Committed units exceed the load even at minimum output."""


class NoFeasibleSolutionError(InfeasibleError):
    """Every candidate examined was infeasible."""


class UndefinedMetricError(CopulaQaoaError, ArithmeticError):
    """A metric is undefined for the given samples (no feasible shot)."""


class ExperimentStageError(CopulaQaoaError):
    """A pipeline stage failed inside run_experiment.

    Attributes
    ----------
        stage: Name of the stage that failed

    """

    def __init__(self, stage: str, cause: BaseException):
        """Wrap ``cause`` and record the failing stage."""
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
