"""Exception types shared across the package."""


class GQError(Exception):
    """Base class for all gqkit errors."""


class OutOfRangeId(GQError):
    pass


class DuplicatePointOnLine(GQError):
    pass


class NotAxiom3(GQError):
    pass


class NotPrime(GQError):
    pass


class TooLarge(GQError):
    pass


class NoIrreducibleForm(GQError):
    pass


class GcdViolation(GQError):
    pass


class EvenH(GQError):
    pass


class NoNucleus(GQError):
    pass


class SamePoint(GQError):
    pass


class ConcurrentLines(GQError):
    pass


class NotThick(GQError):
    pass


class NotOrdered(GQError):
    pass


class WrongBaseType(GQError):
    pass


class WrongOrderShape(GQError):
    pass


class BudgetExceeded(GQError):
    """Search stopped early.  ``partial`` holds whatever was found."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DegreeMismatch(GQError):
    pass


class IncompatibleTypes(GQError):
    pass


class NotIdeal(GQError):
    pass


class NotAHyperplane(GQError):
    pass


class NotPrimeFactor(GQError):
    pass


class DiagramDoesNotCommute(GQError):
    pass


class UnsupportedObject(GQError):
    pass


class NotClosedIn(GQError):
    pass


class NoRepresentative(GQError):
    pass


class NotFullGrid(GQError):
    pass


class NoRationalPoint(GQError):
    pass


class NotAChain(GQError):
    pass


class NotInTower(GQError):
    pass


class BadFlags(GQError):
    pass
