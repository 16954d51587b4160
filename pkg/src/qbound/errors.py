"""Exception hierarchy shared by all qbound modules."""


class QBoundError(Exception):
    """Base class for every error raised by qbound."""


class NonHermitian(QBoundError):
    pass


class NonFinite(QBoundError):
    pass


class DimensionMismatch(QBoundError):
    pass


class DegenerateBase(QBoundError):
    pass


class NotMember(QBoundError):
    pass


class LPInfeasible(QBoundError):
    pass


class LPUnbounded(QBoundError):
    pass


class ValidationError(QBoundError):
    """An object violates one of its invariants (state, POVM, channel...)."""


class NotTracePreserving(ValidationError):
    pass


class InvalidChoi(ValidationError):
    pass


class SingularMarginal(QBoundError):
    pass


class SingularNormalizer(QBoundError):
    pass


class NotInterior(QBoundError):
    pass


class NotPSD(QBoundError):
    pass


class NotQubit(QBoundError):
    pass


class NonConvergence(QBoundError):
    pass


class ValidationFailed(QBoundError):
    """A computed decomposition did not pass its reconstruction/boundary checks."""
