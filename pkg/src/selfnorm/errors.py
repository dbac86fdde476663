"""Exception types shared across the package."""

from __future__ import annotations


class SelfNormError(Exception):
    """Base class for all package errors."""


class ConfigError(SelfNormError, ValueError):
    """Invalid configuration or model parameter.

    ``field`` names the offending key so callers (and the CLI) can point at it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericError(SelfNormError, ArithmeticError):
    """A numeric routine failed to reach its tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        self.achieved = achieved
        if achieved is not None:
            message = f"{message} (achieved tolerance {achieved:.3g})"
        super().__init__(message)


class DegenerateError(SelfNormError, ArithmeticError):
    """A statistic's normaliser vanished (zero variance, zero quadratic variation)."""


class ExperimentAborted(SelfNormError):
    """An experiment cell was abandoned, e.g. too many degenerate paths."""

    def __init__(self, message: str, cell: str | None = None):
        self.cell = cell
        if cell:
            message = f"[{cell}] {message}"
        super().__init__(message)
