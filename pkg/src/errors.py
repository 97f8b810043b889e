"""
Exception hierarchy for the discrete Lagrangian descriptor library.

Library code raises these; only the CLI turns them into exit codes.
"""


class DLDError(Exception):
    """Base class for all library errors."""


class ParameterError(DLDError, ValueError):
    """A parameter set violates its invariants."""


class NonPositiveMultiplier(DLDError, ArithmeticError):
    """The normal-form multiplier U(xi*eta) is not positive at the queried point."""


class IndexOutOfRange(DLDError, IndexError):
    """A tabulated lambda sequence was queried outside its index range."""


class NonFiniteIterate(DLDError, ArithmeticError):
    """An orbit overflowed to a non-finite value and no escape radius was set."""


class DegenerateRate(DLDError, ArithmeticError):
    """A closed form was requested at a rate where its geometric sums degenerate."""


class InsufficientSignal(DLDError):
    """Finite-difference derivatives show no monotone growth under refinement."""


class FewerThanK(DLDError):
    """Not enough non-escaped nodes to satisfy a marker request."""


class FormatError(DLDError):
    """A serialized field could not be parsed."""
