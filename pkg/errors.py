"""Exception hierarchy shared by the simulator, pipeline, protocol and nodes."""

from __future__ import annotations

from pathlib import Path


class CardiorespError(Exception):
    """Base class for every error raised deliberately by this project."""


class ParameterError(CardiorespError, ValueError):
    """A parameter or configuration value violates its invariant."""


class OutOfRangeError(ParameterError):
    """A query point lies outside the valid domain."""


class InsufficientDataError(CardiorespError, ValueError):
    """A series is too short for the requested operation."""


class DataError(CardiorespError, ValueError):
    """Input data is non-finite, malformed, or does not match its schema."""


class ConfigFileError(ParameterError):
    """A scenario or pipeline config file could not be parsed or validated."""

    def __init__(self, path: Path | str, message: str, line: int | None = None):
        self.path = Path(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{where}: {message}")
