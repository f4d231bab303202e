"""Exception taxonomy shared by all modules.

Two error classes matter to callers (and map onto CLI exit codes):
usage problems (bad parameter values) and data problems (malformed or
insufficient input).  Everything raised by this package derives from
:class:`CatenaeError` so embedding applications can catch one type.
"""


class CatenaeError(Exception):
    """Base class for all errors raised by catenae."""


class ParameterError(CatenaeError, ValueError):
    """A parameter is outside its documented range (usage error, exit 1)."""


class DataError(CatenaeError):
    """Input data is malformed, missing, or unusable (exit 2)."""


class ParseError(DataError):
    """A file could not be parsed; message names the file and line."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line


class ValidationError(DataError):
    """Parsed data violates a documented invariant (closed vocabulary, bounds)."""


class DomainError(DataError):
    """The operation is undefined for this input (empty profile, too few sentences)."""


class NoOccurrenceError(DataError):
    """The target phrase never occurs in the corpus."""


class InsufficientEvidenceError(DataError):
    """No perturbation of the phrase has corpus support, so it cannot be assessed."""


class UndefinedMetricError(DataError):
    """The requested metric is undefined for this input (empty lists, zero variance)."""


class DogmaticConflictError(DataError):
    """Consensus of two dogmatic opinions (u1 = u2 = 0) has no defined value."""
