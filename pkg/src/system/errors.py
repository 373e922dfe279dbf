"""
Exception hierarchy shared by the model, optimizer, scenario and harness layers.
"""

from typing import Optional


class IrsApgError(Exception):
    """Base class for all optimizer errors"""
    pass


class InvalidInputError(IrsApgError, ValueError):
    """Exception raised for inconsistent dimensions, bad indices or non-finite inputs"""
    pass


class NumericalError(IrsApgError, ArithmeticError):
    """Exception raised when an objective evaluation turns non-finite"""
    pass


class ConfigurationError(IrsApgError):
    """Exception raised for invalid scenario, solver or experiment configuration"""
    pass


class SolveFailure(IrsApgError):
    """Exception raised when one Monte-Carlo solve fails"""

    def __init__(self, message: str, realization: int, experiment: Optional[str] = None):
        self.realization = realization
        self.experiment = experiment
        where = f"{experiment} " if experiment else ""
        super().__init__(f"{where}realization {realization}: {message}")


class SandwichViolation(IrsApgError, AssertionError):
    """Exception raised when a smoothed group rate leaves its log-sum-exp bounds"""

    def __init__(self, message: str, group: int):
        self.group = group
        super().__init__(f"group {group}: {message}")
