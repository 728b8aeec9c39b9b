"""Exception hierarchy for the bernconv package."""


class BernconvError(Exception):
    """Base class for all package errors."""


class SpecValidationError(BernconvError, ValueError):
    """A convolution spec (or its JSON document) violates its contract."""


class TailUnboundedError(BernconvError):
    """A tail rule cannot produce the bound the operation needs.

    Raised when a bound-only tail (``geometric-bound``) is asked for a
    pointwise term value or for a strictly positive lower tail bound.
    """


class FactorOutOfRangeError(BernconvError, ValueError):
    """An infinite-product factor lies outside (0, 1]."""


class DimensionMismatchError(BernconvError, ValueError):
    """Probability vectors of different lengths were combined."""


class DominationViolationError(BernconvError):
    """Coordinatewise absolute continuity (nu_k << mu_k) fails."""


class SpaceMismatchError(BernconvError, ValueError):
    """Measures or maps over different finite spaces were combined."""


class HypothesisViolationError(BernconvError):
    """A theorem hypothesis required by the operation is not certified."""


class LevelTooLargeError(BernconvError, ValueError):
    """An enumeration level exceeds the configured ceiling."""


class ResolutionError(BernconvError, ValueError):
    """Box size too small for the cylinder resolution of the level."""


class DomainError(BernconvError, ValueError):
    """An evaluation point lies outside the distribution's range."""


class RangeError(BernconvError, ValueError):
    """A numeric parameter lies outside its documented range."""
