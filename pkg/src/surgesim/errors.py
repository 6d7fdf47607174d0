from typing import List, Optional

__all__ = [
    'SurgeSimError',
    'NotConvergedError',
    'ScenarioError',
    'ExpectationError',
]


class SurgeSimError(Exception):
    """Base class of every error raised by surgesim."""


class NotConvergedError(SurgeSimError):
    """
    A run exhausted its horizon where a converged run was required.

    Attributes:
        horizon (Optional[int]): The horizon that turned out to be too small.
    """
    def __init__(self, message: str, horizon: Optional[int] = None):
        super().__init__(message)
        self.horizon = horizon


class ScenarioError(SurgeSimError):
    """
    Scenario text could not be parsed or validated.

    Attributes:
        errors (List[str]): One ``location: message`` entry per offending field.
    """
    def __init__(self, errors: List[str], scenario: Optional[str] = None):
        self.errors = list(errors)
        self.scenario = scenario
        prefix = f"scenario '{scenario}': " if scenario else ''
        super().__init__(prefix + '; '.join(self.errors))


class ExpectationError(SurgeSimError):
    """
    A run did not meet the expectations embedded in its scenario.

    Attributes:
        failures (List[str]): Human readable description of each unmet expectation.
    """
    def __init__(self, failures: List[str], scenario: Optional[str] = None):
        self.failures = list(failures)
        self.scenario = scenario
        prefix = f"scenario '{scenario}': " if scenario else ''
        super().__init__(prefix + '; '.join(self.failures))
