"""Exception hierarchy shared by every qslope module."""
from __future__ import annotations


class QSlopeError(Exception):
    """Base class for all library errors."""


class ContextMismatch(QSlopeError):
    pass


class ZeroScalar(QSlopeError, ZeroDivisionError):
    pass


class InsufficientPrecision(QSlopeError):
    pass


class PrecisionInsufficientForRank(InsufficientPrecision):
    pass


class DivisionByZeroSeries(QSlopeError, ZeroDivisionError):
    pass


class NonzeroConstantTerm(QSlopeError):
    pass


class PreconditionViolated(QSlopeError):
    pass


class ExactRootUnavailable(QSlopeError):
    pass


class DivisionByZeroOperator(QSlopeError, ZeroDivisionError):
    pass


class ZeroOperator(QSlopeError):
    pass


class NonIntegralSlope(QSlopeError):
    pass


class IrrationalExponent(QSlopeError):
    def __init__(self, message: str, factor: object = None):
        super().__init__(message)
        self.factor = factor


class NotFirstSlope(QSlopeError):
    pass


class ResidualNonzero(QSlopeError):
    pass


class InsufficientData(QSlopeError):
    pass


class NonUnitConstantTerm(QSlopeError):
    pass


class ShapeMismatch(QSlopeError):
    pass


class ZeroElement(QSlopeError):
    pass


class DivergentDirection(QSlopeError):
    pass


class BasisVerificationFailed(QSlopeError):
    pass


class ComponentCollision(QSlopeError):
    pass


class ParseError(QSlopeError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = ""
        if text:
            pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at column {position}{pointer}")
