"""Exception hierarchy.

Two families matter to callers: :class:`HypothesisViolation` means the
input does not satisfy what an algorithm assumes (a user error), and
:class:`InvariantBreach` means something that should be impossible happened
inside an algorithm.
"""


class FairDivError(Exception):
    pass


class InvalidInstance(FairDivError, ValueError):
    pass


class InvalidItem(InvalidInstance):
    pass


class InvalidAllocation(FairDivError, ValueError):
    pass


class TooLarge(FairDivError):
    """Exhaustive enumeration would exceed the size guard."""


class TooLargeForExhaustiveCheck(TooLarge):
    pass


class CycleDetected(FairDivError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(f"envy cycle {self.cycle}")


class HypothesisViolation(FairDivError):
    """The instance is outside the class an algorithm is guaranteed for."""


class PreconditionError(HypothesisViolation):
    pass


class UnsupportedValuation(HypothesisViolation):
    pass


class NotCommon(HypothesisViolation):
    pass


class NotCommonOrder(HypothesisViolation):
    pass


class NotBoundedInterval(HypothesisViolation):
    pass


class NotDistinctFavorites(HypothesisViolation):
    pass


class NotDistinctTiers(HypothesisViolation):
    pass


class InfeasibleParams(HypothesisViolation):
    pass


class UnknownBuilder(HypothesisViolation, KeyError):
    pass


class InvariantBreach(FairDivError):
    pass


class NoSourceAfterDecycle(InvariantBreach):
    pass


class BuilderPostconditionFailed(InvariantBreach):
    pass


class TierExtensionNotFound(InvariantBreach):
    def __init__(self, message, state=None):
        self.state = state
        super().__init__(message)
