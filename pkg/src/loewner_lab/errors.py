"""Exception hierarchy shared by all loewner_lab modules."""


class LoewnerLabError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(LoewnerLabError):
    """A matrix expected to be Hermitian fails the Hermiticity check."""


class DimensionMismatch(LoewnerLabError):
    """Operands have incompatible shapes."""


class NotPositive(LoewnerLabError):
    """A matrix expected to be PSD has an eigenvalue below tolerance."""


class NotAProjection(LoewnerLabError):
    """A matrix expected to be an orthogonal projection is not one."""


class DomainViolation(LoewnerLabError):
    """Spectrum (or argument) leaves the domain of a scalar function."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = list(offending) if offending is not None else []


class NotBoundedBelow(LoewnerLabError):
    """A compressed matrix is not bounded below by eta on the corner."""


class BadRank(LoewnerLabError):
    """Requested projection rank is out of range."""


class PreconditionViolated(LoewnerLabError):
    """An interpolation hypothesis fails beyond tolerance."""


class ContractViolated(LoewnerLabError):
    """Post-hoc audit of a construction failed; the output is not trusted."""


class InfeasibleColumn(LoewnerLabError):
    """Column completion constraint is infeasible (norm of fixed column > 1)."""


class InfeasibleCorner(LoewnerLabError):
    """Corner completion constraint is infeasible."""


class NotCompressed(LoewnerLabError):
    """A sequence element is not supported by the face it is paired with."""


class BadParameters(LoewnerLabError):
    """Parameters of a model example are outside their allowed range."""
