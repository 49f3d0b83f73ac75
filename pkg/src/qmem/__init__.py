"""Thermal stability analysis of stabilizer and subsystem quantum memories."""

__version__ = "0.1.0"

from .codespec import CodeSpec, builtin_code, parse_builtin, parse_code, validate
from .errors import (
    AmbiguousGroundError,
    BoundViolation,
    InputError,
    NumericalError,
    ParseError,
    PreconditionError,
    QmemError,
    SizeLimitError,
)
from .pauli import PauliOperator, pauli_from_string

__all__ = [
    "__version__",
    "CodeSpec",
    "PauliOperator",
    "builtin_code",
    "parse_builtin",
    "parse_code",
    "pauli_from_string",
    "validate",
    "QmemError",
    "InputError",
    "ParseError",
    "SizeLimitError",
    "AmbiguousGroundError",
    "PreconditionError",
    "BoundViolation",
    "NumericalError",
]
