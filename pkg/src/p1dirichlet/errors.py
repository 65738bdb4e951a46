"""Exception types shared by the library and the command line."""


class P1Error(Exception):
    """Base class for all library errors."""


class InputError(P1Error):
    """Malformed input text.

    ``line`` and ``col`` are 1-based when known.
    """

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        self.message = message
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class PreconditionError(P1Error):
    """An operation was called outside its domain of definition."""


class ValidationError(PreconditionError):
    """An adelic divisor failed validation; ``violations`` lists the reasons."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))
