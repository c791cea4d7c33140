"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain an operation accepts."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    Attributes
    ----------
    achieved : float or None
        Best error estimate reached before giving up, if known.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ResolutionError(NumericalError):
    """Spectrum too coarse to resolve the quantity being measured."""


class UnreachableTargetError(ValueError):
    """Requested coverage cannot be met within the allowed band counts.

    Attributes
    ----------
    floor : float
        Coverage obtained with the smallest allowed number of bands.
    ceiling : float
        Coverage obtained with the largest allowed number of bands.
    """

    def __init__(self, message, floor, ceiling):
        super().__init__(message)
        self.floor = floor
        self.ceiling = ceiling
