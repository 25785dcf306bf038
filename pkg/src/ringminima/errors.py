"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class; anything else is allowed to surface as a plain ValueError from
argument validation.
"""


class RingMinimaError(Exception):
    """Base class for all package-specific errors."""


class ZeroPolynomial(RingMinimaError):
    """An operation received the zero polynomial or zero form."""


class UnsupportedDegree(RingMinimaError):
    """Degree outside the range implemented for the requested operation."""


class NotSquarefree(RingMinimaError):
    """A squarefree form/polynomial was required."""


class ZeroDiscriminant(RingMinimaError):
    """Discriminant vanished where a nondegenerate object was required."""


class UnitDiscriminant(RingMinimaError):
    """|disc| = 1: logarithmic profile coordinates are undefined."""


class DegenerateDiscriminant(RingMinimaError):
    """Discriminant degenerate for the requested construction."""


class PrecisionExhausted(RingMinimaError):
    """Numeric certification failed at the maximum working precision."""


class FactorizationTimeout(RingMinimaError):
    """Integer factorization exceeded its time budget."""


class NonCommutativeTable(RingMinimaError):
    """Structure constants define a non-commutative product."""


class NonAssociativeTable(RingMinimaError):
    """Structure constants define a non-associative product."""


class DimensionMismatch(RingMinimaError):
    """Vector/matrix dimensions inconsistent with the ring rank."""


class InvalidTable(RingMinimaError):
    """A flag table violated its required monotonicity/shape constraints."""


class InvalidPoint(RingMinimaError):
    """A profile point had the wrong arity or violated basic constraints."""


class UnknownPolytope(RingMinimaError):
    """Polytope name not in the registry."""


class UnknownFunction(RingMinimaError):
    """Density function name not in the registry."""


class ResourceBudgetExceeded(RingMinimaError):
    """Requested enumeration exceeds the configured point budget."""


class UnsupportedDedup(RingMinimaError):
    """Deduplication mode not available for the requested degree."""


class ShapeViolation(RingMinimaError):
    """Matrix pair/tensor does not match the required family shape."""


class PairingNotFound(RingMinimaError):
    """No pairing of embeddings onto resolvent roots certified numerically."""
