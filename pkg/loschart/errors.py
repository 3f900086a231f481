"""Exceptions and warning categories raised by the library."""

from typing import Optional


class LosChartError(Exception):
    """Base class for all library errors."""


class ConfigurationError(LosChartError, ValueError):
    """A system configuration or config file is unusable."""


class InfeasibleDesignError(LosChartError, ValueError):
    """No system setting satisfies the requested area and constraints."""

    def __init__(self, clause: str, detail: str):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}: {detail}")


class DisconnectedGraphError(LosChartError, ValueError):
    """The neighbor graph is too fragmented to embed."""

    def __init__(self, message: str, min_density: Optional[float] = None):
        self.min_density = min_density
        if min_density is not None:
            message = f"{message} Increase the UE density to at least {min_density:.3e} UEs/m^2."
        super().__init__(message)


class DatasetFormatError(LosChartError, ValueError):
    """A dataset, chart or config file does not follow its format."""


class GroundTruthMissingError(LosChartError, ValueError):
    """An operation needs ground-truth positions that the input lacks."""


class ScenarioRunError(LosChartError):
    """A reproduction scenario failed in one of its stages."""

    def __init__(self, scenario: str, stage: str, cause: Exception):
        self.scenario = scenario
        self.stage = stage
        self.cause = cause
        super().__init__(f"scenario '{scenario}' failed while {stage}: {cause}")


class IsolatedGraphWarning(UserWarning):
    """Every node of a thresholded graph is isolated."""


class ExcludedNodesWarning(UserWarning):
    """Some nodes fall outside the largest connected component."""


class NonEuclideanWarning(UserWarning):
    """Classical MDS met negative leading eigenvalues."""
