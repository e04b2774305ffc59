"""Exception hierarchy shared by the analytic and simulation modules."""


class RumorTreeError(Exception):
    """Base class for all package errors."""


class LawError(RumorTreeError, ValueError):
    """Invalid offspring-law parameters or an unparsable distribution spec."""


class NumericalError(RumorTreeError, ArithmeticError):
    """A numerical procedure could not deliver a certified answer."""


class ConvergenceError(NumericalError):
    """Fixed-point iteration hit its iteration cap."""


class BoundsNotApplicable(NumericalError):
    """Preconditions of the range tail bounds are violated."""
