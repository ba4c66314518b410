"""Exception types raised by isopair."""


class IsopairError(Exception):
    """Base class for all isopair errors."""


class NonFiniteError(IsopairError, ValueError):
    """Input contains NaN or Inf entries."""


class DimensionMismatch(IsopairError, ValueError):
    """Operands live on spaces of different dimension."""


class NotHermitianError(IsopairError, ValueError):
    """A Hermitian matrix was required."""


class ContainmentError(IsopairError):
    """A subspace is not contained in another one.

    ``residual`` holds the norm of the component of the smaller subspace
    that lies outside the larger one.
    """

    def __init__(self, msg, residual):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


class InvalidBCLData(IsopairError, ValueError):
    """U is not unitary or P is not an orthogonal projection."""


class PurityError(IsopairError):
    """An operation needs a pure isometry (or pure pair) and did not get one."""


class DirectSumError(IsopairError):
    """Wandering-subspace decomposition failed to reconstruct the whole space."""

    def __init__(self, msg, residual):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


class TruncationError(IsopairError, ValueError):
    """A query falls outside the trusted degree band of a truncated model."""


class ConvergenceError(IsopairError):
    """Degree escalation did not stabilize before the configured limit."""

    def __init__(self, msg, history=()):
        super().__init__(msg)
        self.history = list(history)


class RouteDisagreement(IsopairError):
    """Two independent routes to the same quantity disagree beyond tolerance."""

    def __init__(self, msg, difference, bound):
        super().__init__(f"{msg}: difference {difference:.3e} exceeds {bound:.3e}")
        self.difference = difference
        self.bound = bound


class ConsistencyError(IsopairError):
    """The five defect verdicts are not all equal.

    Carries the full diagnostic payload so a failing instance can be replayed.
    """

    def __init__(self, msg, verdicts, residuals):
        super().__init__(f"{msg}: verdicts={verdicts} residuals={residuals}")
        self.verdicts = dict(verdicts)
        self.residuals = dict(residuals)


class SchemaError(IsopairError, ValueError):
    """A JSON document does not match the expected layout."""
