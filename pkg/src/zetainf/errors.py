"""Exception types shared across the package."""


class ZetaInfError(Exception):
    """Base class for all package errors."""


class RegionError(ZetaInfError, ValueError):
    """Invalid region parameters, malformed region file or bad point dimension."""


class UnsupportedError(ZetaInfError):
    """The requested (region, norm, radius) combination has no evaluator."""


class DomainError(ZetaInfError, ValueError):
    """Argument outside the region where a formula or integral converges."""


class PoleError(DomainError):
    """Evaluation requested at a declared pole."""

    def __init__(self, location, message=None):
        self.location = complex(location)
        super().__init__(message or f"declared pole at s = {self.location}")


class AccumulationBoundaryError(PoleError):
    """A search window touches an accumulation point of poles."""


class DepthExhaustedError(ZetaInfError):
    """Pole isolation ran out of subdivision depth."""

    def __init__(self, window, message=None):
        self.window = window
        super().__init__(message or f"subdivision depth exhausted in {window}")


class ConvergenceWarning(UserWarning):
    """A Monte Carlo or quadrature estimate did not reach its target accuracy."""
