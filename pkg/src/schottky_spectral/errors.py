"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes, so each class carries the code
it should produce.
"""

from __future__ import annotations


class SchottkyError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class InputError(SchottkyError):
    """Malformed or unreadable input (bad JSON, missing keys, bad flags)."""

    exit_code = 1


class ValidationError(SchottkyError):
    """Schottky data that fails the geometric checks."""

    exit_code = 2

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class WordError(SchottkyError, ValueError):
    """A word that is not reduced or uses letters outside the alphabet."""

    exit_code = 1


class PoleError(SchottkyError, ValueError):
    """A Möbius map evaluated or measured across its pole."""


class NumericalError(SchottkyError):
    """A numerical routine that did not reach its accuracy target."""

    exit_code = 3


class BranchCutError(NumericalError):
    """A complex power requested on the principal branch cut."""


class ZeroOnContourError(NumericalError):
    """A function with a zero on (or numerically at) an integration contour."""


class EnumerationCapError(SchottkyError):
    """An exhaustive enumeration asked to go past its configured cap."""

    exit_code = 4


class InfeasibleParameters(SchottkyError, ValueError):
    """Parameters outside the range where a construction is defined."""

    exit_code = 4
