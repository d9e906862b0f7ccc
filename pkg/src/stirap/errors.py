class StirapError(Exception):
    """Base class for all errors raised by the package."""


class ContractViolation(StirapError, ValueError):
    """An input broke an operation's precondition (e.g. a non-Hermitian matrix)."""


class DomainError(StirapError, ValueError):
    """A time or parameter lies outside the domain where a quantity is defined."""


class UsageError(StirapError, TypeError):
    """An operation was called with an unsupported protocol variant."""


class ConfigError(StirapError, ValueError):
    """Invalid run configuration. Maps to CLI exit code 1."""


class NumericFailure(StirapError, RuntimeError):
    """An integrated trajectory breached a certified invariant. Maps to CLI exit code 2."""

    def __init__(self, quantity: str, value: float, time: float):
        self.quantity = quantity
        self.value = value
        self.time = time
        super().__init__(f"{quantity} = {value:.3e} first breached at t = {time:.6g}")
