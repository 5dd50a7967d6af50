"""
Exception hierarchy for obstrukt

Structural problems with inputs raise a ValidationError subclass carrying a
witness. Theorem-level disagreements are never raised; they end up as a
violation verdict inside a report.
"""

from typing import Any, Optional, Tuple


class ObstruktError(Exception):
    """Base class for every error raised by the workbench"""


class ValidationError(ObstruktError):
    """An input object failed one of its structural invariants"""

    def __init__(self, message: str, witness: Optional[Tuple[Any, ...]] = None):
        self.reason = message
        self.witness = witness
        self.object_name: Optional[str] = None
        super().__init__(message)

    def __str__(self):
        text = self.reason
        if self.witness is not None:
            text = f"{text} (witness: {self.witness})"
        if self.object_name:
            text = f"{self.object_name}: {text}"
        return text


class NotAssociative(ValidationError):
    pass


class NoIdentity(ValidationError):
    pass


class NoInverse(ValidationError):
    pass


class NotAHomomorphism(ValidationError):
    pass


class NotAbelian(ValidationError):
    pass


class NotAutomorphism(ValidationError):
    pass


class NotFunctorial(ValidationError):
    pass


class NotACocycle(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NotEquivariant(ValidationError):
    pass


class ModuleMismatch(ValidationError):
    pass


class NotExact(ValidationError):
    pass


class DegreeTooHigh(ValidationError):
    pass


class PrecrossedViolation(ValidationError):
    pass


class PeifferViolation(ValidationError):
    pass


class ButterflyViolation(ValidationError):
    """One clause of the butterfly axioms failed"""

    def __init__(self, clause: str, message: str, witness: Optional[Tuple[Any, ...]] = None):
        self.clause = clause
        super().__init__(message, witness)


class NotACategory(ValidationError):
    pass


class NotAFunctor(ValidationError):
    pass


class CompositionMismatch(ValidationError):
    pass


class FibresNotGroupoidal(ValidationError):
    pass


class SourceTargetMismatch(ValidationError):
    pass


class ParseError(ObstruktError):
    """A fixture file could not be read"""

    def __init__(self, file: str, line: int, reason: str):
        self.file = file
        self.line = line
        self.reason = reason
        super().__init__(f"{file}:{line}: {reason}")


class BudgetExceeded(ObstruktError):
    """An exhaustive search would exceed the configured budget"""

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: {size} candidates exceeds budget {budget}")


class InternalError(ObstruktError):
    """An invariant that only a bug can break"""
