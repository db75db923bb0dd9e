"""Exception hierarchy."""


class ImaginarityError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ImaginarityError, ValueError):
    """An input violates a documented precondition or invariant."""


class UnsupportedDimensionError(ValidationError):
    """The operation is only defined for a particular Hilbert-space dimension."""


class ParseError(ValidationError):
    """A state, channel or grid description could not be parsed."""


class NumericalError(ImaginarityError, ArithmeticError):
    """A numerical routine failed (non-convergence, non-finite objective, ...)."""
