"""Exception types shared across the library."""


class QveError(Exception):
    """Base class for all qve errors."""


class ShapeMismatchError(QveError):
    """Vector or matrix dimensions do not match the problem size."""


class NegativeEntryError(QveError):
    """Problem data must have finite nonnegative entries."""


class StochasticityViolationError(QveError):
    """a + B(e kron e) deviates from the all-ones vector beyond tolerance."""


class ReducibleMatrixError(QveError):
    """A nonnegative matrix required to be irreducible is reducible."""


class ReducibleMeanMatrixError(ReducibleMatrixError):
    """The mean progeny matrix of a problem is reducible."""


class NotNonnegativeError(QveError):
    """A matrix required to be entrywise nonnegative has negative entries."""


class NoConvergenceError(QveError):
    """Iterative eigensolver exhausted its budget."""


class ComplexDominantError(QveError):
    """The eigenvalue of maximal real part has a non-negligible imaginary part."""


class SingularLinearSolveError(QveError):
    """Inner linear system of a fixed-point variant is singular."""


class SingularJacobianError(QveError):
    """Newton correction system is singular."""


class DegenerateNormalizationError(QveError):
    """Normalization denominator w'b(u,u) vanishes (quadratic term degenerate)."""


class DegenerateProjectorError(QveError):
    """A projector denominator in the Jacobian formulas is too close to zero."""


class NotASolutionError(QveError):
    """Vector passed as a solution does not satisfy the equation to tolerance."""


class NotCriticalError(QveError):
    """Problem is not critical (spectral radius of the mean matrix is not 1)."""


class InsufficientHistoryError(QveError):
    """Residual history too short for a rate fit."""


class OutOfRangeError(QveError):
    """Scalar parameter outside its admissible range."""


class TargetUnreachableError(QveError):
    """Requested spectral radius exceeds the family's maximum."""
