"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`DctnetError`.
The CLI maps the three families onto exit codes: argument problems (1),
data problems (2) and numeric failures (3).
"""


class DctnetError(Exception):
    """Base class for all package errors."""


class ArgumentError(DctnetError, ValueError):
    """A caller passed an argument outside the documented domain."""


class DataError(DctnetError):
    """Input data (files, manifests, signals) cannot be used."""


class FormatError(DataError):
    """A file does not follow the expected container layout."""


class UnsupportedFormatError(FormatError):
    """Valid container, but a codec or bit depth we do not decode."""


class LengthError(FormatError):
    """A binary payload is shorter than its header promises."""


class EmptySignalError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateError(DataError):
    pass


class EmptyManifestError(DataError):
    pass


class TooShortError(DataError):
    """Signal shorter than the analysis span requires."""

    def __init__(self, message, required=None, actual=None):
        super().__init__(message)
        self.required = required
        self.actual = actual


class NumericError(DctnetError, ArithmeticError):
    """Training diverged or produced non-finite values."""
