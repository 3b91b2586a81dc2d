"""Exception types shared across the toolkit."""


class BhwError(Exception):
    """Base class for toolkit errors."""


class SingularTransformError(BhwError, ValueError):
    pass


class BudgetExceededError(BhwError):
    """The candidate region is beyond the configured enumeration budget."""


class AmbiguityError(BhwError):
    """A verdict depends on a lattice point whose membership is float-ambiguous."""


class MarginError(BhwError):
    """The requested parameter sits inside a threshold exclusion window."""


class PerturbationTooLargeError(BhwError, ValueError):
    pass
