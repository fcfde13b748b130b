"""Exception hierarchy shared by every module."""


class NestCoronaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidModel(NestCoronaError, ValueError):
    """A block-size list is empty or contains a nonpositive size."""


class DimensionError(NestCoronaError, ValueError):
    """A matrix does not match the dimensions of its model."""


class SingularInput(NestCoronaError, ValueError):
    """Input matrix is numerically singular."""

    def __init__(self, message, sigma_min=None):
        super().__init__(message)
        self.sigma_min = sigma_min


class NotPositiveDefinite(NestCoronaError, ValueError):
    """Input matrix is not Hermitian positive definite."""

    def __init__(self, message, lambda_min=None):
        super().__init__(message)
        self.lambda_min = lambda_min


class EmptyInstance(NestCoronaError, ValueError):
    """A corona instance was given no matrices."""


class ConditionViolated(NestCoronaError):
    """A lower-bound (epsilon) hypothesis fails.

    ``witness`` names the failing compression: an integer nest index, or one
    of the strings ``"eps_25"``, ``"P0"``, ``"P1"``, ``"toeplitz"``,
    ``"lemma"``, ``"scalar"``.
    """

    def __init__(self, message, witness=None, measured=None, diagnostics=None):
        super().__init__(message)
        self.witness = witness
        self.measured = measured
        self.diagnostics = dict(diagnostics or {})


class NumericalContractionError(NestCoronaError, ArithmeticError):
    """``||I - T||`` was not below one in the left-inverse construction."""

    def __init__(self, message, contraction=None):
        super().__init__(message)
        self.contraction = contraction


class NotInStratum(NestCoronaError, ValueError):
    """Matrix has support outside the requested band."""


class NotInCommutant(NestCoronaError, ValueError):
    """Super-operator does not commute with left multiplication by the diagonal."""


class InvalidDescriptor(NestCoronaError, ValueError):
    """Model descriptor is inconsistent with its model."""


class WindowError(NestCoronaError, ValueError):
    """Averaging window too large for the matrix size."""


class ResidualNotMet(NestCoronaError):
    """Scalar corona solve hit the degree cap before reaching tolerance."""

    def __init__(self, message, curve=None, result=None):
        super().__init__(message)
        self.curve = list(curve or [])
        self.result = result
