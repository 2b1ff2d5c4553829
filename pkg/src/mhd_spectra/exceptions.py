"""Exception hierarchy.

Physics-level failures (bad profiles, indefinite pencils, stable spectra where
a growing mode is required) derive from :class:`MHDSpectraError`; the CLI maps
them to exit status 2. :class:`ConfigError` is the one I/O-side error and maps
to exit status 1.
"""

from __future__ import annotations


class MHDSpectraError(Exception):
    """Base class for all errors raised by the package."""


class SizeError(MHDSpectraError, ValueError):
    """Array or grid too small, or dimensions that do not match."""


class DomainError(MHDSpectraError, ValueError):
    """Argument outside the admissible domain (density floor, p0 <= 0, ...)."""


class CaseError(MHDSpectraError, ValueError):
    """Case and field orientation do not agree."""


class UnsupportedCaseError(CaseError):
    """Operation is not defined for the requested case."""


class DefinitenessError(MHDSpectraError):
    """Mass matrix failed its Cholesky factorization."""


class ModeError(MHDSpectraError):
    """A growing eigenmode was requested but the principal eigenvalue is <= 0."""


class DominanceError(MHDSpectraError):
    """No wave number satisfies the dominance condition Lambda < 2 lambda."""


class BlowUpError(MHDSpectraError, FloatingPointError):
    """Time integration produced non-finite values."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class ConfigError(MHDSpectraError, ValueError):
    """Invalid run configuration; ``lineno`` points into the config text."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
