"""Exception hierarchy shared by every module."""

from __future__ import annotations


class AdtError(Exception):
    """Base class for all library errors."""


class SexpSyntaxError(AdtError):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


class SignatureError(AdtError):
    """Malformed signature or name collision."""


class SortError(AdtError):
    """Ill-typed term or formula."""


class DerivationError(AdtError):
    """Ill-formed or ill-typed derivation."""


class DecodeError(AdtError):
    """Integer is not the code of a derivation."""


class EvaluationError(AdtError):
    """Evaluation failed: unbound variable, missing interpretation, etc."""


class UnsamplableSort(AdtError):
    pass


class ResourceError(AdtError):
    """A configured ceiling or budget was exceeded."""


class SpecError(AdtError):
    """Specification has the wrong shape for the requested operation."""


class ExtractionError(AdtError):
    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind
