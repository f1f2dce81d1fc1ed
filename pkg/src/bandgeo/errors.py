"""Exception types shared across the package."""


class BandGeoError(Exception):
    """Base class for domain errors (as opposed to bad-argument errors)."""


class UnknownModelError(BandGeoError):
    """Raised when a model id is not in the registry."""


class ExceptionalPointError(BandGeoError):
    """Raised when an operation that requires a gapped spectrum hits a
    point where the complex gap closes (epsilon = omega = 0)."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class GaplessError(BandGeoError):
    """Raised when a gapped-phase-only quantity is requested at gapless
    parameters."""


class PivotRadiusError(BandGeoError):
    """Raised when an explicit pivot radius is too small for the cloud."""


class CloudError(BandGeoError):
    """Raised for point clouds that cannot be processed (e.g. < 3 points)."""
