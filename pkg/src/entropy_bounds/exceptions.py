"""Exception hierarchy shared by every module of the package."""


class EntropyBoundsError(Exception):
    """Base class for all package errors."""


class SpecError(EntropyBoundsError, ValueError):
    """A measure spec string failed to parse or violates a parameter constraint."""


class DomainError(EntropyBoundsError, ValueError):
    """A derivative was requested outside the guarded open interval."""


class NegativeEntryError(EntropyBoundsError, ValueError):
    pass


class SumNotOneError(EntropyBoundsError, ValueError):
    pass


class TooShortError(EntropyBoundsError, ValueError):
    pass


class NotHermitianError(EntropyBoundsError, ValueError):
    pass


class NotDensityMatrixError(EntropyBoundsError, ValueError):
    pass


class NotNormalizedError(EntropyBoundsError, ValueError):
    pass


class NoConvergenceError(EntropyBoundsError, RuntimeError):
    pass


class Lambda0OutOfRangeError(EntropyBoundsError, ValueError):
    pass


class MinerOverflowError(EntropyBoundsError, ValueError):
    pass


class TargetOutOfRangeError(EntropyBoundsError, ValueError):
    """The requested H_g value is not attainable in the given dimension."""

    def __init__(self, target, low, high):
        self.target = target
        self.interval = (low, high)
        super().__init__(
            f"target {target!r} outside attainable interval [{low!r}, {high!r}]"
        )


class ConditionIndeterminateError(EntropyBoundsError):
    """The pair (f, g) was not certified strictly convex or concave."""


class DegenerateMeasureError(EntropyBoundsError, ValueError):
    """g'' vanishes somewhere on the classification grid."""


class EmptySlabError(EntropyBoundsError, ValueError):
    pass


class DimensionTooLargeError(EntropyBoundsError, ValueError):
    pass
