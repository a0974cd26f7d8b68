"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the set where the operation is defined."""


class ValidationError(ValueError):
    """A value violates the invariants of its type."""


class ReliabilityError(RuntimeError):
    """A Monte Carlo estimate is not trustworthy (too many unfinished walks)."""


class ExperimentAborted(RuntimeError):
    """An experiment cannot reach a verdict; carries the diagnostic message."""
