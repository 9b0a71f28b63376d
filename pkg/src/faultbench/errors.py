"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
TrainingError -> 3.
"""


class FaultbenchError(Exception):
    """Base class for all package errors."""


class ConfigError(FaultbenchError):
    """Invalid run configuration or unusable command-line arguments."""


class DataError(FaultbenchError):
    """Unreadable, malformed, or degenerate data."""


class TrainingError(FaultbenchError):
    """A trainer could not satisfy its contract on the given inputs."""
