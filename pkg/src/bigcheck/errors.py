"""Exception hierarchy shared by all bigcheck modules."""


class BigcheckError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(BigcheckError, ValueError):
    pass


class TooLarge(BigcheckError, ValueError):
    pass


class DivisionByZero(BigcheckError, ZeroDivisionError):
    pass


class FieldMismatch(BigcheckError, TypeError):
    pass


class ZeroArgument(BigcheckError, ValueError):
    pass


class ZeroPolynomial(BigcheckError, ValueError):
    pass


class NotSimpleRoot(BigcheckError, ValueError):
    pass


class CapExceeded(BigcheckError, RuntimeError):
    """Closure of a generating set grew past the configured cap."""


class NotInvertible(BigcheckError, ValueError):
    pass


class ZeroVector(BigcheckError, ValueError):
    pass


class BudgetExceeded(BigcheckError, RuntimeError):
    """A computation would exceed one of the configured size budgets."""


class TooLargeForOracle(BigcheckError, RuntimeError):
    pass


class HypothesisFailed(BigcheckError, ValueError):
    """The hypothesis of a lemma does not hold for the given input."""


class NotFound(BigcheckError, LookupError):
    pass


class BadPrime(BigcheckError, ValueError):
    pass


class BadOrder(BigcheckError, ValueError):
    pass
