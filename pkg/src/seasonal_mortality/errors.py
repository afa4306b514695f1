"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for bad inputs
(caught before any fitting happens) and :class:`SolverError` for numerical
failures inside the penalized IWLS fit. The command line maps them to
distinct exit codes.
"""


class SeasonalMortalityError(Exception):
    """Base class for all package errors."""


class ValidationError(SeasonalMortalityError, ValueError):
    """Input data or parameters violate a precondition."""


class SolverError(SeasonalMortalityError, ArithmeticError):
    """The penalized IWLS fit failed numerically."""


# -- ingestion ---------------------------------------------------------------
class MalformedRow(ValidationError):
    pass


class MissingMonth(ValidationError):
    pass


class DuplicateMonth(ValidationError):
    pass


class NegativeDeaths(ValidationError):
    pass


class MissingPopulationYear(ValidationError):
    pass


class NonPositivePopulation(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


# -- basis / design ----------------------------------------------------------
class DegenerateDomain(ValidationError):
    pass


class OrderTooLarge(ValidationError):
    pass


class ShortSeries(ValidationError):
    pass


class ExposureLengthMismatch(ValidationError):
    pass


# -- solver ------------------------------------------------------------------
class InvalidWeights(ValidationError):
    pass


class NonPositiveMu(ValidationError):
    pass


class SingularSystem(SolverError):
    pass


class NonConvergenceWarning(RuntimeWarning):
    """IWLS hit its iteration cap; the returned fit has ``converged=False``."""


class DevianceIncreaseWarning(RuntimeWarning):
    """An IWLS step increased the penalized deviance."""


# -- forecasting / evaluation / excess ---------------------------------------
class WrongModelKind(ValidationError):
    pass


class ZeroObserved(ValidationError):
    pass


class MonthNotInHorizon(ValidationError):
    pass


class OverlappingPeriods(ValidationError):
    pass
