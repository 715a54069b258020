"""Exception types shared across the package."""


class SpdSubspaceError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(SpdSubspaceError):
    pass


class NotPositiveDefinite(SpdSubspaceError):
    """A matrix required to be SPD failed a positivity check."""


class SingularFactor(SpdSubspaceError):
    """Triangular solve hit a zero diagonal entry."""


class NoConvergence(SpdSubspaceError):
    """Iterative eigenvalue sweep exhausted its sweep budget."""


class DomainError(SpdSubspaceError):
    """Matrix function evaluated outside its spectral domain."""


class Overflow(SpdSubspaceError):
    """A step would exponentiate beyond double-precision range."""


class OverlappingDirections(SpdSubspaceError):
    """Direction set violates the pairwise non-overlap requirement."""


class StructureViolation(SpdSubspaceError):
    """Matrix does not have update-factor sparsity."""


class NoClosedForm(SpdSubspaceError):
    """Problem instance matches no recognized closed-form optimum."""


class ConfigError(SpdSubspaceError):
    """Invalid CLI or config-file settings."""
