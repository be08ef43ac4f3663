"""Exception hierarchy shared across the package."""


class VpxError(Exception):
    """Base class for all errors raised by vpx."""


class ContractViolation(VpxError, ValueError):
    """Inputs do not satisfy a documented precondition (shapes, lengths)."""


class SingularMatrix(VpxError):
    def __init__(self, message, pivot=None, column=None):
        super().__init__(message)
        self.pivot = pivot
        self.column = column


class NullSpaceDimensionError(VpxError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class IterationLimit(VpxError):
    """The simplex pivot cap was hit before reaching a verdict."""


class SingularConfiguration(VpxError):
    """A point set has no unique Radon partition with nonzero weights."""


class EmptyIntersection(VpxError):
    """Relative interiors of the two hulls do not meet."""


class SingularBasis(VpxError):
    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class VerificationFailure(VpxError):
    """A computed object failed its a-posteriori residual check."""


class DegenerateExchange(VpxError):
    """The entering point received (numerically) zero weight."""


class NoProgress(VpxError):
    """An exchange did not strictly increase the levelled deviation."""


class InsufficientPoints(VpxError):
    pass


class UnknownFunction(VpxError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class TableShapeMismatch(VpxError, ValueError):
    pass


class ProblemFormatError(VpxError, ValueError):
    """A problem or coefficient file could not be parsed or validated."""
