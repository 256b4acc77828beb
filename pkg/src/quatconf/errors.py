"""Exception types shared across the package."""


class QuatconfError(Exception):
    """Base class for all package errors."""


class DomainError(QuatconfError):
    """Input outside the mathematical domain of an operation."""


class ConstructionError(QuatconfError):
    """A map could not be built from the given data."""


class HypothesisError(QuatconfError):
    """A theorem hypothesis required by an operation does not hold."""


class SingularPointError(QuatconfError):
    """Evaluation requested at a singular/excluded point."""


class NonConformalError(QuatconfError):
    """Curvature requested at a point where the map is not conformal."""


class InconclusiveFitError(QuatconfError):
    """A numerical fit did not resolve to a usable answer."""


class ConsistencyError(QuatconfError):
    """Two independent evaluations of the same quantity disagree."""


class DegreeMismatchError(QuatconfError):
    """The two point counts of a sphere map disagree.

    Carries both counts so callers can inspect unbalanced pairs.
    """

    def __init__(self, count_i: int, count_minus_i: int):
        self.count_i = count_i
        self.count_minus_i = count_minus_i
        super().__init__(
            f"preimage counts disagree: #N^-1(i) = {count_i}, "
            f"#N^-1(-i) = {count_minus_i} (unbalanced pair)"
        )
