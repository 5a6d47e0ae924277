# src/exceptions.py
"""Custom exceptions for the loop algebra engine."""
from typing import Optional, Sequence


class LoopAlgebraException(Exception):
    """Base exception for the loop algebra engine."""

    def __init__(self, message: str, status_code: int = 500):
        self.message = message
        self.status_code = status_code
        super().__init__(self.message)


class ValidationError(LoopAlgebraException):
    """Raised when a model, presentation or request fails validation."""

    def __init__(self, message: str):
        super().__init__(message, 400)


class RingMismatchError(LoopAlgebraException):
    """Raised when values over different coefficient rings are combined."""

    def __init__(self, left: str, right: str):
        super().__init__(f"Ring mismatch: {left} vs {right}", 400)


class NonInvertibleError(LoopAlgebraException):
    """Raised when inverting a scalar that is not a unit of its ring."""

    def __init__(self, value: str, ring: str):
        super().__init__(f"{value} is not invertible over {ring}", 400)


class NonHomogeneousError(LoopAlgebraException):
    """Raised when an operation needs a homogeneous input."""

    def __init__(self, what: str):
        super().__init__(f"{what} is not homogeneous", 400)


class AlgebraMismatchError(LoopAlgebraException):
    """Raised when elements of different algebras or models are combined."""

    def __init__(self, message: str = "Elements belong to different algebras"):
        super().__init__(message, 400)


class ParseError(LoopAlgebraException):
    """Raised when an expression does not match the grammar."""

    def __init__(self, message: str, position: int, expected: Optional[Sequence[str]] = None):
        self.position = position
        self.expected = list(expected or [])
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail, 400)


class UnknownGeneratorError(LoopAlgebraException):
    """Raised when an expression names a generator the model lacks."""

    def __init__(self, name: str, position: Optional[int] = None):
        self.name = name
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"Unknown generator '{name}'{where}", 400)


class WindowTooLargeError(LoopAlgebraException):
    """Raised when a degree window exceeds the configured cap."""

    def __init__(self, lo: int, hi: int, cap: int):
        super().__init__(
            f"Window {lo}:{hi} exceeds the degree cap {cap} (LOOPALG_MAX_DEGREE)", 400)


class ModelNotFoundError(LoopAlgebraException):
    """Raised when a model id is not in the catalog."""

    def __init__(self, model_id: str):
        super().__init__(f"Model '{model_id}' not found", 404)


class UnsupportedRingError(LoopAlgebraException):
    """Raised when an operation needs a field but got the integers."""

    def __init__(self, operation: str, ring: str):
        super().__init__(f"{operation} requires a field, got {ring}", 422)


class DerivationPathUnavailableError(LoopAlgebraException):
    """Raised when the derivation form of Delta is not defined for a model."""

    def __init__(self, model_id: str):
        super().__init__(
            f"Derivation path unavailable for {model_id}: coefficients are not a field "
            "and the base homology has torsion", 422)


class InfiniteBasisError(LoopAlgebraException):
    """Raised when a graded piece is infinite and no word-length bound was given."""

    def __init__(self, degree: int):
        super().__init__(
            f"Degree {degree} piece is infinite-dimensional; pass a word-length bound", 422)


class PresentationDivergesError(LoopAlgebraException):
    """Raised when rewriting exceeds the step guard or revisits a monomial."""

    def __init__(self, message: str):
        super().__init__(message, 500)


class PathDisagreementError(LoopAlgebraException):
    """Raised when the two constructions of Delta give different results."""

    def __init__(self, eq1: str, deriv: str):
        self.eq1 = eq1
        self.deriv = deriv
        super().__init__(f"Delta paths disagree: eq1 = {eq1}, deriv = {deriv}", 500)
