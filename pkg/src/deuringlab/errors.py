"""Shared error types with the failure modes the library promises."""


class DeuringLabError(Exception):
    pass


class DivisionByZero(DeuringLabError, ZeroDivisionError):
    pass


class NotASquare(DeuringLabError):
    pass


class SingularCurve(DeuringLabError, ValueError):
    pass


class TorsionFieldTooLarge(DeuringLabError):
    pass


class BadKernelOrder(DeuringLabError, ValueError):
    pass


class WrongCurve(DeuringLabError, ValueError):
    pass


class InconsistentImages(DeuringLabError, ValueError):
    pass


class NoMatch(DeuringLabError):
    pass


class RankDeficient(DeuringLabError, ValueError):
    pass


class NotAnOrder(DeuringLabError, ValueError):
    pass


class SearchExhausted(DeuringLabError):
    pass


class NoAutomorphismFound(DeuringLabError):
    pass


class BudgetExceeded(DeuringLabError):
    pass


class NotConnected(DeuringLabError):
    pass


class NonIntegralIdeal(DeuringLabError, ValueError):
    pass


class OracleFailure(DeuringLabError):
    pass


class NonIntegerM(DeuringLabError):
    pass


class RetryBudgetExceeded(DeuringLabError):
    pass


class DegenerateBasis(DeuringLabError, ValueError):
    pass


class UnsupportedPrime(DeuringLabError, ValueError):
    pass


class ForbiddenOracle(DeuringLabError):
    """Raised when a reduction touches an oracle wired as forbidden."""
