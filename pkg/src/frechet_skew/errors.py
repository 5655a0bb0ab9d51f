"""Exception hierarchy.

Errors fall in two classes that the command line maps to distinct exit
codes: bad input (``InputError``) and numerical breakdown
(``NumericalError``).
"""


class FrechetSkewError(Exception):
    """Base class for every error raised by this package."""


class InputError(FrechetSkewError, ValueError):
    pass


class NumericalError(FrechetSkewError, ArithmeticError):
    pass


class InvalidParams(InputError):
    pass


class UnnormalizedCustomPdf(InputError):
    pass


class InvalidP(InputError):
    pass


class EmptyDomainIntersection(InputError):
    pass


class NonDifferentiablePdf(InputError):
    pass


class DivergentIntegral(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class NoBracket(NumericalError):
    """The balance residual did not change sign over the expanded bracket."""


class NearSingularP(NumericalError):
    pass


class NormalizationMismatch(NumericalError):
    pass


class MomentDiverges(NumericalError):
    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)
