"""Exception hierarchy shared by all qmem modules.

The CLI maps these onto exit codes: input problems exit 2, size refusals
exit 3 and violated inequalities exit 4.
"""


class QmemError(Exception):
    """Base class for all errors raised by qmem."""


class InputError(QmemError, ValueError):
    """Malformed or inconsistent user input."""


class PauliSyntaxError(InputError):
    """A Pauli token list could not be parsed."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"token {position}: {message}"
        super().__init__(message)


class ParseError(InputError):
    """A code-definition file could not be parsed or failed validation."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LogicalError(InputError):
    """An operator offered as a logical fails a logical-operator invariant."""


class AmbiguousGroundError(QmemError):
    """The global energy minimum is reached in more than one syndrome sector."""


class SizeLimitError(QmemError):
    """A computation was refused because it exceeds a configured size limit."""


class PreconditionError(QmemError):
    """A theorem's hypothesis does not hold for the supplied model."""


class BoundViolation(QmemError):
    """A proven inequality failed numerically; this signals a bug."""


class NumericalError(QmemError):
    """A numerical invariant (trace, positivity, hermiticity) drifted too far."""
