"""Exception and warning types raised across the package."""


class ARError(Exception):
    """Base class for all package errors."""


class AsymmetricInput(ARError, ValueError):
    pass


class MalformedFile(ARError, ValueError):
    pass


class NonFiniteWeight(ARError, ValueError):
    pass


class NegativeWeight(ARError, ValueError):
    pass


class LengthMismatch(ARError, ValueError):
    pass


class NumericalFailure(ARError, ArithmeticError):
    pass


class RankOutOfRange(ARError, ValueError):
    pass


class ZeroNetwork(ARError, ValueError):
    """Normalization requested on a network with no off-diagonal mass."""


class AllZeroSpectrum(ARError, ValueError):
    pass


class IndexOutOfRange(ARError, IndexError):
    pass


class EmptyRepelSpace(ARError, ValueError):
    """Repel-space query on a decomposition with no usable repel vectors."""


class FoldTooLarge(ARError, ValueError):
    pass


class NonPositiveDiagonal(ARError, ValueError):
    pass


class ProbabilityOutOfRange(ARError, ValueError):
    pass


class UnknownNode(ARError, KeyError):
    def __str__(self):
        # KeyError quotes its argument; keep messages plain.
        return str(self.args[0]) if self.args else ""


class NotConverged(UserWarning):
    """Solver hit its iteration cap before reaching the requested tolerance."""


class DegenerateBlock(UserWarning):
    """A BCV kept block had lower numerical rank than the requested k."""
