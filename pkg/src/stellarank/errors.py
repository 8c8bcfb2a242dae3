"""Exception hierarchy shared by the library and the command line."""


class StellarRankError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(StellarRankError, ValueError):
    pass


class InvalidRankError(StellarRankError, ValueError):
    pass


class ContractViolation(StellarRankError, ValueError):
    """An input breaks a documented precondition (e.g. Hermiticity)."""


class NumericOverflowError(StellarRankError, ArithmeticError):
    pass


class InvalidMeasurementError(StellarRankError, ValueError):
    pass


class ConvergenceFailure(StellarRankError, RuntimeError):
    """Truncation growth hit the dimension cap before the value settled.

    The best value seen so far is attached as ``best`` together with the
    dimension at which it was obtained.
    """

    def __init__(self, message, best=None, dim=None):
        super().__init__(message)
        self.best = best
        self.dim = dim
