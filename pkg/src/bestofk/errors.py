"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input -> 1, runtime/resource
failures -> 2, failed verification checks -> 3.
"""


class BestOfKError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(BestOfKError, ValueError):
    """An argument violates an operation's precondition."""


class InvalidInputError(BestOfKError, ValueError):
    """A structured input (leaf colouring, configuration) is incomplete or malformed."""


class EdgeListFormatError(BestOfKError, ValueError):
    """Edge-list file rejected; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GenerationError(BestOfKError, RuntimeError):
    """A randomised generator exhausted its retry budget."""


class ResourceLimitError(BestOfKError, RuntimeError):
    """An operation would exceed a configured size/overflow budget."""


class VerificationError(BestOfKError):
    """A property check requested via the CLI did not hold."""
