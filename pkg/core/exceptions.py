"""Exception hierarchy shared by the library, the descriptor layer and the CLI."""
from typing import Optional


class SoftfixError(Exception):
    """Root of every error raised on purpose by softfix."""


class SoftDomainError(SoftfixError, ValueError):
    """Operands from different parameter sets or universes, unknown labels, zero divisors."""


class InfeasibleError(SoftfixError, ValueError):
    """A coefficient component reached its class threshold."""


class PreconditionError(SoftfixError):
    """An operation was called outside its documented preconditions."""


class DegenerateGeometryError(PreconditionError):
    """A separation radius has a zero component."""


class RateViolationError(SoftfixError):
    """An observed Picard step ratio exceeded the certified rate."""


class DescriptorError(SoftfixError):
    """Invalid descriptor text, with a diagnostic code and a location."""

    def __init__(self, code: str, message: str, path: str = "", line: Optional[int] = None):
        """
        Initialize diagnostic.

        Args:
            code: Diagnostic code (E_SYNTAX, E_SCHEMA, E_DUP_LABEL, ...)
            message: Human-readable explanation
            path: Dotted field path inside the descriptor
            line: Line number for syntax errors
        """
        self.code = code
        self.message = message
        self.path = path
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.path:
            where.append(self.path)
        location = f" ({', '.join(where)})" if where else ""
        return f"{self.code}{location}: {self.message}"
