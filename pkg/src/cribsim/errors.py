"""Exception types shared across the package.

Everything raised on purpose derives from :class:`CribsimError` so callers
(CLI, service) can map failures to exit codes / HTTP statuses in one place.
"""

from __future__ import annotations


class CribsimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CribsimError):
    """Malformed run configuration (bad key, unit, section or value)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NormalizationError(CribsimError):
    """State amplitudes do not describe a normalized qubit."""


class SeparationError(CribsimError):
    """Time-bin separation too small for the bins to be distinguishable."""


class GridError(CribsimError):
    """A sampling grid does not cover the support it needs to."""


class GridMismatchError(CribsimError):
    """Two field records live on different time grids."""


class DomainError(CribsimError):
    """Parameter outside the mathematical domain of a closed form."""


class KindError(CribsimError):
    """Operation applied to the wrong broadening kind."""


class RangeError(CribsimError):
    """Coordinate outside the medium."""


class ResolutionError(CribsimError):
    """Grid too coarse to resolve the requested dynamics."""


class WindowError(CribsimError):
    """Simulation window does not contain the expected echo."""


class ZeroEchoError(CribsimError):
    """No recalled energy to normalize a fidelity against."""


class SingularityError(CribsimError):
    """Evaluation point sits on a pole/branch point of a closed form."""
