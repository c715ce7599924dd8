"""Exception hierarchy shared by every module of the package."""


class RegenError(Exception):
    """Base class for all errors raised by :mod:`regencodes`."""


class FieldMismatchError(RegenError, ValueError):
    pass


class FieldDivisionError(RegenError, ZeroDivisionError):
    pass


class NotPrimeError(RegenError, ValueError):
    pass


class ShapeError(RegenError, ValueError):
    pass


class SingularMatrixError(RegenError, ArithmeticError):
    pass


class InjectivityError(RegenError, ValueError):
    pass


class FieldTooSmallError(RegenError, ValueError):
    pass


class ParamsError(RegenError, ValueError):
    pass


class UnsupportedRepairError(RegenError):
    """Optimal repair was requested for a node the code cannot repair optimally."""


class HelperSetError(RegenError, ValueError):
    pass


class ArityError(RegenError, ValueError):
    pass


class IndependenceError(RegenError, ValueError):
    pass


class InvalidSigmaError(RegenError, ValueError):
    pass


class CorruptionError(RegenError):
    """An internal invariant of a decoder failed; never raised for a valid code."""


class BudgetError(RegenError):
    pass


class InsufficientNodesError(RegenError):
    pass


class ManifestError(RegenError, ValueError):
    pass
