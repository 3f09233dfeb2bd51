"""Exception types raised across the package."""

from __future__ import annotations


class HermGeomError(Exception):
    """Base class for all package errors."""


# -- fields -----------------------------------------------------------------

class NonPrime(HermGeomError, ValueError):
    pass


class NoModulusAvailable(HermGeomError, ValueError):
    pass


class OrderTooLarge(HermGeomError, ValueError):
    pass


class DivisionByZero(HermGeomError, ZeroDivisionError):
    pass


class FieldMismatch(HermGeomError, TypeError):
    pass


class NoQuadraticSubfieldDeclared(HermGeomError, ValueError):
    pass


# -- projective geometry ------------------------------------------------------

class ZeroVector(HermGeomError, ValueError):
    pass


class IndexOutOfRange(HermGeomError, IndexError):
    pass


class TooManyFlats(HermGeomError, ValueError):
    pass


class BadPivot(HermGeomError, ValueError):
    pass


# -- hermitian forms ---------------------------------------------------------

class DegenerateForm(HermGeomError, ValueError):
    pass


class NotComplementary(HermGeomError, ValueError):
    pass


class NotHyperplane(HermGeomError, ValueError):
    pass


class BadParameters(HermGeomError, ValueError):
    pass


# -- polynomials -------------------------------------------------------------

class DimensionMismatch(HermGeomError, ValueError):
    pass


class DegreeTooHighForCriterion(HermGeomError, ValueError):
    pass


# -- census ------------------------------------------------------------------

class SingularSystem(HermGeomError, ArithmeticError):
    pass


class InfeasibleSolution(HermGeomError, ArithmeticError):
    pass


class NoHintAndNoBudget(HermGeomError, ValueError):
    pass
