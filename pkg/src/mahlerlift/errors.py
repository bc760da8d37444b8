"""Exception hierarchy shared by all modules.

Every mathematically *negative* outcome that the caller may want to catch
(a pole at the origin, a failed stabilization, an unsolvable lift) gets its
own class.  Genuine usage errors (bad strings, inconsistent shapes) raise
plain ``ValueError``.
"""


class MahlerError(Exception):
    """Base class for all library-specific errors."""


class PoleAtOrigin(MahlerError):
    """A rational function or system matrix has a pole at z = 0."""


class DegreeBudgetExceeded(MahlerError):
    """Symbolic cocycle iteration would exceed the configured degree budget."""


class SizeBudgetExceeded(MahlerError):
    """A Kronecker power would exceed the configured dimension budget."""


class NotRegularAt(MahlerError):
    """Evaluation requested at an iterate where the matrix is singular or undefined."""

    def __init__(self, k, kind="singular"):
        self.k = k
        self.kind = kind
        super().__init__(f"system matrix not regular at iterate k={k} ({kind})")


class AlphaOutOfRange(MahlerError):
    """Certification requires 0 < |alpha| < 1."""


class AmbiguousInitialVector(MahlerError):
    """ker(A(0) - I) has dimension >= 2 and no initial vector was supplied."""


class InconsistentInitialVector(MahlerError):
    """The supplied initial vector does not satisfy (A(0) - I) f0 = 0."""


class StabilizationFailed(MahlerError):
    """Kernel or rank did not stabilize before the iterate budget ran out."""

    def __init__(self, max_k, detail=""):
        self.max_k = max_k
        msg = f"stabilization failed before k reached {max_k}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class InsufficientOrder(MahlerError):
    """Truncation order too small for the requested kernel computation."""


class MissingCoeffBound(MahlerError):
    """A tail-bound verification needs a (C, rho) coefficient bound on the system."""


class RhoAlphaNotContracting(MahlerError):
    """Tail bounds require rho * |alpha| < 1."""


class NoLiftAtDegree(MahlerError):
    """No functional relation of the given degree specializes to the value relation."""

    def __init__(self, degree):
        self.degree = degree
        super().__init__(f"no lift exists with coefficient degree <= {degree}")


class ValueRelationRefuted(MahlerError):
    """The claimed value relation is refuted by an exact partial sum plus tail bound."""


class ValueRelationUnverified(MahlerError):
    """The value relation could not be verified and no override was given."""


class EmptyKernel(MahlerError):
    """Defensive: an auxiliary-function kernel that must be nontrivial came out empty."""


class RankNotStabilized(MahlerError):
    """Relation-module rank did not agree across consecutive degrees or orders."""


class PreconditionTauNotARelation(MahlerError):
    """A decay report needs tau to be a verified value relation."""


class NonHomogeneousPolynomial(MahlerError):
    """Algebraic lifting accepts homogeneous polynomials only."""
