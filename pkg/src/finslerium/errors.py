"""Exception hierarchy shared by every module."""


class FinsleriumError(Exception):
    """Base class for all library errors."""


class DomainError(FinsleriumError, ValueError):
    """Evaluation outside the region where a quantity is defined."""


class OutOfDomainError(DomainError):
    """Base point outside the declared domain of a metric."""


class PoleSingularityError(DomainError):
    """A pole-singular field was evaluated at (or too near) its pole."""


class UnsupportedOrderError(FinsleriumError, ValueError):
    pass


class IllConditionedStepError(FinsleriumError, ValueError):
    pass


class IllConditionedMetricError(FinsleriumError, ArithmeticError):
    """Levi matrix too close to singular for a stable Hermitian solve."""


class ShapeError(FinsleriumError, ValueError):
    pass


class ConfigurationError(FinsleriumError, ValueError):
    pass


class DegenerateCurveError(FinsleriumError, ValueError):
    pass


class DegenerateVariationError(FinsleriumError, ValueError):
    pass


class ContractViolationError(FinsleriumError, ValueError):
    pass


class HypothesisViolationError(FinsleriumError):
    """Curvature hypotheses of the Schwarz inequality do not hold."""
