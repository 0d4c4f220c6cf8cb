"""Exception types raised across the package."""


class LipfreeError(Exception):
    """Base class for all package errors."""


class InvalidMetric(LipfreeError, ValueError):
    """A distance matrix failed one or more metric axioms.

    ``violations`` holds every :class:`lipfree.metric.Violation` found, not
    just the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(str(v) for v in self.violations[:5])
        if len(self.violations) > 5:
            msg += f"; ... ({len(self.violations)} violations)"
        super().__init__(msg)


class MissingBasePoint(LipfreeError, ValueError):
    pass


class IndexOutOfRange(LipfreeError, IndexError):
    pass


class DimensionMismatch(LipfreeError, ValueError):
    pass


class InvalidNorm(LipfreeError, ValueError):
    pass


class SingletonDomain(LipfreeError, ValueError):
    pass


class NotScalar(LipfreeError, TypeError):
    pass


class NonPolyhedralCodomain(LipfreeError, TypeError):
    pass


class SingularMap(LipfreeError, ValueError):
    pass


class SolverFailure(LipfreeError, RuntimeError):
    pass


class NumericalBreakdown(SolverFailure):
    """The simplex lost accuracy; the result would not be trustworthy."""


class EngineFailure(LipfreeError, RuntimeError):
    pass


class PairwiseFailure(LipfreeError, ValueError):
    """A ball system lacks a pairwise intersection it was required to have."""
