from __future__ import annotations


class LddCalculatorError(ValueError):
    """Base class for every error raised by the calculator."""


class PauliError(LddCalculatorError):
    """Raised for malformed Pauli strings and qubit-count mismatches."""


class CodeFormatError(LddCalculatorError):
    """Raised when a code, decoder or DD file does not follow its grammar."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class CodeValidationError(LddCalculatorError):
    """Raised when a stabilizer code violates one of its invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid code")


class DecoderError(LddCalculatorError):
    """Raised when a decoder table is not total or not syndrome-consistent."""


class BudgetExceededError(LddCalculatorError):
    """Raised instead of starting an enumeration that is too large to finish."""


class PreconditionError(LddCalculatorError):
    """Raised when an analysis is requested outside the regime where it is defined."""


class DomainError(LddCalculatorError):
    """Raised for parameters outside their admissible range."""

    def __init__(self, name: str, value, expected: str):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value} is outside {expected}")
