"""Exception hierarchy shared by the library and the command line driver."""


class OrbitalError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class MalformedInput(OrbitalError, ValueError):
    exit_code = 4


class DegenerateInput(OrbitalError, ValueError):
    """The characteristic polynomial has zero discriminant."""

    exit_code = 2


class NotElliptic(OrbitalError):
    """The characteristic polynomial has a root in the ring of integers."""

    exit_code = 2


class NotIntegral(OrbitalError, ArithmeticError):
    exit_code = 4


class RootSearchInconclusive(OrbitalError):
    """A root candidate survived to the search bound without a Hensel certificate."""

    exit_code = 3


class WitnessNotFound(OrbitalError):
    exit_code = 3


class ParityViolation(OrbitalError):
    exit_code = 3


class CharacteristicUnsupported(OrbitalError):
    """Quotient-measure formulas need char(F) = 0 or char(F) > n."""

    exit_code = 5


class InternalCaseGap(OrbitalError, AssertionError):
    exit_code = 1


class ProfileInconsistent(OrbitalError, ValueError):
    exit_code = 4


class ProvisoUnverified(OrbitalError):
    exit_code = 1


class PreconditionError(OrbitalError, ValueError):
    exit_code = 4


class PrecisionTooLow(OrbitalError):
    exit_code = 7


class BudgetExceeded(OrbitalError):
    exit_code = 7


class WindowUnstable(OrbitalError):
    exit_code = 7
