"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Invalid argument or malformed input data."""


class NumericError(ArithmeticError):
    """Non-finite values reached a numerical routine."""


class ToleranceUnreachableError(RuntimeError):
    """The requested kernel tolerance could not be met within ``K_max`` terms.

    The best result found is kept on ``report`` so callers can still use it.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class LUTBuildError(RuntimeError):
    """A lookup-table cell failed to reach its tolerance."""

    def __init__(self, message, sigma=None, eps=None):
        super().__init__(message)
        self.sigma = sigma
        self.eps = eps


class ParseError(ValueError):
    """Malformed file contents; ``lineno`` is 1-based when known."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class UnsupportedFormatError(ParseError):
    """Recognized but unsupported image variant (ASCII PGM, 16-bit, ...)."""
