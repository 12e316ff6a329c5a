"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class OSGError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(OSGError, ValueError):
    """A physical parameter violates its domain."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class NumericalError(OSGError, ArithmeticError):
    """Two independent numerical routes disagree, or an input is not a valid state."""


class ScanTooShort(OSGError):
    """The time scan ends before the concurrence has died for good."""


class DegenerateInput(OSGError, ValueError):
    """The requested ratio is undefined at this input."""


class GridViolation(OSGError):
    """A spatial grid cannot represent the wavefunctions it is asked to hold."""


class GridMismatch(OSGError, ValueError):
    """Two wavefunctions live on different grids."""


class ConfigError(OSGError, ValueError):
    """Invalid scenario configuration."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.message = message
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ToleranceError(OSGError):
    """A cross-check between closed forms and a numerical route exceeded its tolerance."""
