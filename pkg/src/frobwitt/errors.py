"""Exception types shared across the package."""


class FrobWittError(Exception):
    """Base class for all package errors."""


class NonPrime(FrobWittError, ValueError):
    pass


class DegreeZero(FrobWittError, ValueError):
    pass


class ContextMismatch(FrobWittError, ValueError):
    pass


class BadPrime(FrobWittError, ValueError):
    pass


class PolyParseError(FrobWittError, ValueError):
    pass


class ExponentOverflow(FrobWittError, OverflowError):
    pass


class BudgetExceeded(FrobWittError):
    def __init__(self, required, budget):
        super().__init__(f"enumeration needs {required} evaluations, budget is {budget}")
        self.required = required
        self.budget = budget


class NotInvariant(FrobWittError, ValueError):
    pass


class ZeroVector(FrobWittError, ValueError):
    pass


class CapExceeded(FrobWittError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class UnsupportedCohomologyProfile(FrobWittError, ValueError):
    pass


class NotOrderP(FrobWittError, ValueError):
    pass


class NotExact(FrobWittError, ValueError):
    pass


class DecompositionMismatch(FrobWittError, ValueError):
    pass


class Singular(FrobWittError, ValueError):
    pass
