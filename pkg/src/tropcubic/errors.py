"""Exception types shared across the package.

The split mirrors the three ways an exact computation can refuse to
proceed: the data is structurally wrong, the answer does not exist in
the coefficient field, or the inputs are not known to enough precision
to decide the question.
"""


class TropcubicError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(TropcubicError):
    """Input violates a structural precondition (shape, degree, support)."""


class AlgebraicError(TropcubicError):
    """The requested algebraic object does not exist over Q(zeta_N)."""


class PrecisionError(TropcubicError):
    """A series is not known to enough precision to decide the question.

    Raised, for instance, when asking for the valuation of a series that
    is zero to its truncation order, or when a truncated coefficient
    could still move a Newton polygon.
    """


class SeparationError(AlgebraicError):
    """A Puiseux root branch failed to separate within the depth budget."""
