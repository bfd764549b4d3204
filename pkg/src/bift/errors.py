"""Exception types shared across the package."""


class BiftError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(BiftError):
    """Operand dimensions are incompatible."""


class HermiticityError(BiftError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class UnitarityError(BiftError):
    """A propagator that must be unitary is not, beyond tolerance."""


class ConsistencyError(BiftError):
    """Supplied data contradicts data derived from first principles
    (e.g. a final-state decomposition that does not reconstruct the
    evolved state, or an analytic kernel whose marginals disagree
    with the attached spectra)."""


class PartitionUnavailable(BiftError):
    """A per-subsystem heat partition is required but was not supplied."""


class NotApplicable(BiftError):
    """A check's precondition does not hold for this system
    (e.g. the classical reduction on a non-product eigenbasis)."""


class DomainError(BiftError):
    """A scenario parameter lies outside its admissible range."""


class SizeError(BiftError):
    """The dense tuple table would exceed the size guard."""
