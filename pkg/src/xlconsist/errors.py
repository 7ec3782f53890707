"""Exception types shared across the toolkit."""

from __future__ import annotations


class XlconsistError(Exception):
    """Base class for all toolkit errors."""


class DatasetFormatError(XlconsistError):
    """A dataset file line could not be parsed or violates the schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(XlconsistError):
    """A dataset violates its cross-language alignment invariants."""


class DimensionMismatchError(XlconsistError):
    """An embedding provider returned vectors of an unexpected dimension."""


class CacheMissError(XlconsistError):
    """A cache-only embedding run hit texts that are not in the cache."""

    def __init__(self, missing_keys: list[str]):
        self.missing_keys = missing_keys
        preview = ", ".join(missing_keys[:5])
        more = f" (+{len(missing_keys) - 5} more)" if len(missing_keys) > 5 else ""
        super().__init__(f"{len(missing_keys)} texts missing from cache: {preview}{more}")


class ProviderError(XlconsistError):
    """An embedding or completion endpoint failed after all retries."""


class AuthenticationError(ProviderError):
    """The endpoint rejected our credentials; retrying will not help."""


class MissingAnswersError(XlconsistError):
    """An AnswerSet does not cover the requested (language, item) slice."""

    def __init__(self, missing: list[tuple[str, str]]):
        self.missing = missing
        preview = ", ".join(f"{lang}/{item}" for lang, item in missing[:5])
        more = f" (+{len(missing) - 5} more)" if len(missing) > 5 else ""
        super().__init__(f"{len(missing)} answers missing: {preview}{more}")


class LanguageMismatchError(XlconsistError):
    """Two artifacts that must share a language set do not."""


class ParaphraseMissingError(XlconsistError):
    """Prompt variant p3 was requested but no paraphrase exists for an item."""
