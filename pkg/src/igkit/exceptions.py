"""Exception hierarchy.

Errors split into two families so front ends can map them to exit codes:
``InputError`` for bad data or arguments, ``NumericalError`` for fits and
computations that fail on otherwise valid input.
"""


class IgkitError(Exception):
    """Base class for every error raised by this package."""


class InputError(IgkitError, ValueError):
    pass


class NumericalError(IgkitError, ArithmeticError):
    pass


class DomainError(InputError):
    """Argument outside the support of a function."""


class EmptySample(InputError):
    pass


class NonPositiveValue(InputError):
    pass


class InvalidCorrection(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonPositiveResponse(InputError):
    pass


class FoldTooSmall(InputError):
    pass


class ZeroVarianceTarget(InputError):
    pass


class ConstantColumn(InputError):
    pass


class InvalidStep(InputError):
    pass


class NonPositiveDrift(InputError):
    pass


class CensoredSample(InputError):
    pass


class HeaderMismatch(InputError):
    def __init__(self, missing, header=None):
        self.missing = list(missing)
        self.header = list(header or [])
        super().__init__(f"unresolved columns: {', '.join(self.missing)}")


class MissingValue(InputError):
    def __init__(self, row, column):
        self.row = row
        self.column = column
        super().__init__(f"missing value at row {row}, column {column!r}")


class ParseError(InputError):
    def __init__(self, row, column, text):
        self.row = row
        self.column = column
        self.text = text
        where = f"column {column!r}" if column is not None else "too many fields"
        super().__init__(f"cannot parse {text!r} at row {row}, {where}")


class DegenerateSample(NumericalError):
    """All observations (numerically) equal, so the shape estimate diverges."""


class SingularCovariance(NumericalError):
    pass


class RankDeficientDesign(NumericalError):
    pass


class InvalidMeanDuringIteration(NumericalError):
    pass


class LeverageOne(NumericalError):
    pass


class NonConvergence(NumericalError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])
