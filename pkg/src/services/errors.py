"""
circloyd errors

Every numerical-domain failure derives from LloydError so the CLI
can map the whole family to one exit code.
"""

from typing import Any, Optional


class LloydError(Exception):
    """Base for numerical-domain failures."""
    pass


class DomainError(LloydError):
    """Raised for non-finite input or a parameter outside its domain."""
    pass


class DegenerateConfigurationError(LloydError):
    """Raised when codepoints coincide, n < 2, or an arc has zero length."""
    pass


class CellTooLargeError(LloydError):
    """Raised when a cell or arc is longer than a half circle."""
    pass


class UndefinedCentroidError(LloydError):
    """Raised when a cell's first circular moment vanishes."""
    pass


class PerturbationTooLargeError(LloydError):
    """Raised when a finite-difference step would break the cyclic order."""
    pass


class DimensionMismatchError(LloydError):
    """Raised when matrix and vector sizes disagree."""
    pass


class OrbitError(LloydError):
    """
    Raised when an iteration fails part way.

    Carries the failing step and whatever was computed before it
    (an Orbit or a SalaTrace).
    """

    def __init__(self, message: str, step: int, partial: Optional[Any] = None):
        super().__init__(f"step {step}: {message}")
        self.step = step
        self.partial = partial
