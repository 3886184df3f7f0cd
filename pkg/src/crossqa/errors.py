"""Exception types shared across the engine."""


class CrossQAError(Exception):
    """Base class for all engine errors."""


class UnknownLanguageError(CrossQAError):
    """A language code is not in the registry or not covered by an index."""

    def __init__(self, code: str, context: str = ""):
        self.code = code
        suffix = f" ({context})" if context else ""
        super().__init__(f"unknown language code {code!r}{suffix}")


class EmptyTextError(CrossQAError):
    """Input text produced zero tokens and cannot be embedded."""


class TransportError(CrossQAError):
    """A remote model endpoint was unreachable or returned garbage."""


class DimensionMismatchError(CrossQAError):
    """Vector dimensions disagree between query, index, or operands."""


class IndexFormatError(CrossQAError):
    """An index file has the wrong magic bytes or an unsupported version."""


class IndexCorruptionError(CrossQAError):
    """An index file is truncated or otherwise unreadable past the header."""


class DatasetError(CrossQAError):
    """A QA dataset violates referential integrity (e.g. dangling source ids)."""


class TranslationError(CrossQAError):
    """The translation backend cannot handle the requested language pair."""


class ExtractionError(CrossQAError):
    """A span extraction backend returned spans violating its contract."""
