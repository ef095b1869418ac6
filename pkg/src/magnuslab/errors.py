"""Exception types shared across the package."""


class MagnusLabError(Exception):
    """Base class for all magnus-lab errors."""


class DomainError(MagnusLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class SizeMismatch(MagnusLabError, ValueError):
    """Operands have incompatible matrix sizes."""


class IndexOutOfRange(MagnusLabError, IndexError):
    """A row/column selector is outside 1..n."""


class NotNilpotent(MagnusLabError, ArithmeticError):
    """An exact exponential was requested for a non-nilpotent matrix."""


class BadConstantTerm(MagnusLabError, ValueError):
    """A series logarithm requires the constant coefficient to be the identity."""


class SingularPencil(MagnusLabError, ArithmeticError):
    """A quadrature resolvent lam + (1-lam)*A is numerically singular."""


class PoleError(MagnusLabError, ArithmeticError):
    """A closed-form logarithm was evaluated at (numerically) a pole."""


class RatioUnreachable(MagnusLabError, ValueError):
    """The requested norm ratio is outside the achievable range for this eps."""


class CertificateFailed(MagnusLabError, RuntimeError):
    """An exact certificate check that must always hold did not."""


class ParseError(MagnusLabError, ValueError):
    """Malformed measure or report input."""
