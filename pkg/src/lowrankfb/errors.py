"""Exception types shared across the package."""


class LowRankError(Exception):
    """Base class for all package errors."""


class ZeroPolynomial(LowRankError):
    pass


class ConstantPolynomial(LowRankError):
    pass


class SingularMatrix(LowRankError):
    pass


class DimensionMismatch(LowRankError, ValueError):
    pass


class SingularD(LowRankError):
    pass


class InfeasibleSplit(LowRankError):
    """Raised when m - rho exceeds the state dimension."""


class InadmissiblePartition(LowRankError):
    pass


class ContractViolation(LowRankError):
    pass


class BoundaryDegeneracy(LowRankError):
    """A pole or zero sits on the unit circle."""


class MultiplicityUnsupported(LowRankError):
    pass


class NoAdmissibleRoot(LowRankError):
    """The interpolation problem is infeasible for the requested gamma."""

    def __init__(self, message, suggested_gamma=None):
        super().__init__(message)
        self.suggested_gamma = suggested_gamma


class PoleAtMinusOne(LowRankError):
    pass


class PseudoInverseFailure(LowRankError):
    pass


class RankDeficientU(LowRankError):
    pass


class AlgebraicLoopSingular(LowRankError):
    pass


class UnstableA(LowRankError):
    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class ModelFileError(LowRankError, ValueError):
    pass


class ImproperResultWarning(UserWarning):
    """Tustin substitution hit a pole at z = -1."""
