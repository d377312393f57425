"""Exception types raised by the stabilizing-set computations."""


class PidRegionError(Exception):
    """Base class for every diagnostic raised by this package."""


class DegreeError(PidRegionError, ValueError):
    pass


class DomainError(PidRegionError, ValueError):
    pass


class NotApplicable(PidRegionError):
    pass


class DegenerateSlice(PidRegionError):
    pass


class SingularCancellation(PidRegionError):
    """A root of A*E sits on the boundary where the plant polynomial also vanishes."""


class DegenerateEigenvalue(PidRegionError):
    """dp/dz vanishes at a singular frequency; the crossing direction is undefined."""


class ConsistencyError(PidRegionError):
    def __init__(self, message, propagated=None, verified=None):
        super().__init__(message)
        self.propagated = propagated
        self.verified = verified


class PoleOnAxis(PidRegionError):
    pass


class DeltaInvalid(PidRegionError, ValueError):
    pass


class Inconclusive(PidRegionError):
    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class PlantFileError(PidRegionError, ValueError):
    pass
