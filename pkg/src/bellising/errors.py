"""Exception hierarchy shared by the package.

Every error is a ``ValueError`` subclass so callers that only care about bad
input can catch one type.
"""


class IsingError(ValueError):
    pass


class ValidationError(IsingError):
    pass


class ParseError(IsingError):
    pass


class BasisMismatch(IsingError):
    pass


class PatternViolation(IsingError):
    pass


class NotNormalized(IsingError):
    pass


class InfeasibleSelectors(IsingError):
    pass


class Infeasible(IsingError):
    pass


class SingularBranch(IsingError):
    pass


class PhaseUnsatisfiable(IsingError):
    pass


class NoRoot(IsingError):
    pass


class InfeasibleRadicand(IsingError):
    pass
