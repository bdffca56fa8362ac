"""Exception hierarchy shared by every ebkit module.

All numerical failures derive from :class:`EbkitError` so that callers (and the
CLI) can catch one type and still report the specific failure by class name.
"""


class EbkitError(Exception):
    """Base class for all ebkit numerical and validation errors."""


# moments
class EmptySample(EbkitError, ValueError):
    pass


class ZeroVariance(EbkitError, ValueError):
    pass


class LengthMismatch(EbkitError, ValueError):
    pass


class InvalidInterval(EbkitError, ValueError):
    pass


# pearson
class DegenerateDenominator(EbkitError, ArithmeticError):
    pass


class PoleAtX(EbkitError, ArithmeticError):
    pass


class PoleInGrid(EbkitError, ArithmeticError):
    pass


# tweedie
class NonPositiveU(EbkitError, ValueError):
    pass


class BoundaryX(EbkitError, ValueError):
    pass


class NonPDSigma(EbkitError, ValueError):
    pass


class BadLevel(EbkitError, ValueError):
    pass


# saddlepoint
class OutOfRange(EbkitError, ValueError):
    pass


class NoConvergence(EbkitError, ArithmeticError):
    pass


class NotAvailable(EbkitError, NotImplementedError):
    pass


class UnknownModel(EbkitError, KeyError):
    pass


# linear_eb
class TooFewGroups(EbkitError, ValueError):
    pass


class SingularShrinkageMatrix(EbkitError, ArithmeticError):
    def __init__(self, group: int, cond: float):
        self.group = group
        self.cond = cond
        super().__init__(
            f"shrinkage matrix for group {group} is singular or ill-conditioned "
            f"(cond={cond:.3g}); consider passing ridge=eps to add eps*I"
        )


# symbolic_cluster
class BadK(EbkitError, ValueError):
    pass


class InconsistentPartition(EbkitError, ValueError):
    pass


class ZeroDispersion(EbkitError, ValueError):
    pass


class DegenerateRange(EbkitError, ValueError):
    pass


# ranking
class NotAPermutation(EbkitError, ValueError):
    pass


class ZeroResultant(EbkitError, ArithmeticError):
    pass


class BadOrder(EbkitError, ValueError):
    pass


class DimensionMismatch(EbkitError, ValueError):
    pass
