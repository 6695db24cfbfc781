"""Exception hierarchy shared by all wolffkit modules."""


class WolffkitError(Exception):
    """Base class for all domain errors raised by wolffkit."""


class ParameterError(WolffkitError, ValueError):
    """A parameter tuple violates an admissibility constraint.

    The message names the violated constraint.
    """


class DivergentIntegralError(WolffkitError, ArithmeticError):
    """An integral required to be finite diverges for the given exponents."""


class ProfileFormatError(WolffkitError, ValueError):
    """A serialized radial profile is malformed or inconsistent."""


class NotConvergedError(WolffkitError, RuntimeError):
    """Fixed-point iteration exhausted its budget without converging."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class DegenerateIterationError(WolffkitError, RuntimeError):
    """An iterate collapsed to zero or blew past the overflow guard."""


class NoBracketError(WolffkitError, RuntimeError):
    """Both ends of a shooting bracket classify identically."""


class InterchangeWarning(UserWarning):
    """Parameters were relabeled (p,sigma2) <-> (q,sigma1) to meet q >= p."""
