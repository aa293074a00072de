"""Exception types raised by the library."""


class FeedbackWalkError(ValueError):
    """Base class for all domain errors."""


class ChargeOutOfRange(FeedbackWalkError):
    pass


class InvalidEnvironment(FeedbackWalkError):
    pass


class BudgetZero(FeedbackWalkError):
    pass


class PreconditionViolated(FeedbackWalkError):
    pass


class WithinCriticalTolerance(PreconditionViolated):
    """alpha is within the critical tolerance of 1/2; use a critical classifier."""


class NoCriticalPoint(FeedbackWalkError):
    pass


class RootNotBracketed(FeedbackWalkError):
    pass


class MissingConstantTail(PreconditionViolated):
    pass


class AmbiguousTailClass(FeedbackWalkError):
    pass
