"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an expression is defined."""


class SizingError(ValueError):
    """A file size does not meet the divisibility a scheme requires."""


class DecodeError(RuntimeError):
    """A decoder was handed inputs that do not fit the scheme it runs."""


class PlanningError(RuntimeError):
    """The latency planner could not reach the closed-form optimum."""
