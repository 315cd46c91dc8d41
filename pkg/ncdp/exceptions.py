"""
ncdp Custom Exceptions

Exception hierarchy shared by the field arithmetic, the physical layer,
the MAC simulators and the experiment runner.
"""


class NcdpError(Exception):
    """Base exception for all ncdp errors."""
    pass


# Parameter and contract errors
class ParameterError(NcdpError, ValueError):
    """Raised when an operation is called outside its contract."""
    pass


class DimensionError(NcdpError, ValueError):
    """Raised when matrix/vector shapes do not line up."""
    pass


# Finite field errors
class FieldError(NcdpError):
    """Base class for finite-field errors."""
    pass


class SpecMismatchError(FieldError):
    """Raised when operands belong to different fields."""
    pass


class FieldZeroDivisionError(FieldError, ZeroDivisionError):
    """Raised when inverting or dividing by the zero element."""
    pass


# Experiment and configuration errors
class ExperimentError(NcdpError):
    """Base class for experiment-runner errors."""
    pass


class ConfigError(ExperimentError, ValueError):
    """Raised when an experiment configuration is invalid.

    The offending key is kept in ``field`` so the CLI can name it.
    """

    def __init__(self, message: str, field: str = "") -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class UnknownExperimentError(ConfigError):
    """Raised when an experiment name is not registered."""

    def __init__(self, name: str) -> None:
        super().__init__(f"unknown experiment '{name}'", field="experiment")
        self.name = name


class SimulationError(NcdpError):
    """Raised when a simulation reaches an inconsistent state."""
    pass


__all__ = [
    'NcdpError', 'ParameterError', 'DimensionError',
    'FieldError', 'SpecMismatchError', 'FieldZeroDivisionError',
    'ExperimentError', 'ConfigError', 'UnknownExperimentError',
    'SimulationError',
]
