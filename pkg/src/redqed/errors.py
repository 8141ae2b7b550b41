"""Exception types shared across the toolkit."""


class RedQEDError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(RedQEDError, ValueError):
    """Invalid parameters or configuration values."""


class DomainError(RedQEDError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DimensionMismatch(RedQEDError, ValueError):
    pass


class ContractViolation(RedQEDError):
    """A precondition on a state (e.g. proper normalization) does not hold."""


class DivergenceError(RedQEDError, ArithmeticError):
    """A quadrature produced a non-finite value."""


class TruncationError(RedQEDError, ValueError):
    """Amplitude too large for the Fock-space cutoff."""


class KernelEvaluationError(RedQEDError):
    pass


class UnsupportedError(RedQEDError, NotImplementedError):
    pass


class FeasibilityError(RedQEDError, ValueError):
    """Trial state violates the normalization constraint somewhere.

    ``worst`` holds a description of the most violated node pair.
    """

    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst


class ConstructionError(RedQEDError):
    pass
