"""Exception hierarchy shared by all quatmax modules."""


class QuatmaxError(Exception):
    """Base class for every error raised by quatmax."""


class ContractViolation(QuatmaxError, ValueError):
    """An argument breaks an operation's precondition (e.g. nonzero scalar part)."""


class DomainError(QuatmaxError, ValueError):
    """A field was evaluated at a declared singular point."""


class SingularityError(DomainError):
    """A quantity that must stay nonzero vanished (division by a zero field value)."""


class BranchError(QuatmaxError, ValueError):
    """A principal square root would cross its branch cut on the sampled set."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConfigurationError(QuatmaxError, ValueError):
    """Invalid grid, profile or run configuration."""


class MissingOracle(QuatmaxError, NotImplementedError):
    """A derivative of higher order than the field provides was requested."""
