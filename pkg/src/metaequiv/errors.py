"""Exception hierarchy for metaequiv."""


class MetaEquivError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(MetaEquivError, ValueError):
    pass


class NotSquare(MetaEquivError, ValueError):
    pass


class NotSymmetric(MetaEquivError, ValueError):
    pass


class NotPositiveDefinite(MetaEquivError, ValueError):
    """Raised when a symmetric matrix fails the positive definiteness test.

    ``index`` is the zero-based position of the first nonpositive pivot of
    the Cholesky factorisation (equivalently, the size of the leading minor
    that fails, minus one), or ``None`` when the failure was detected from
    the spectrum.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class IllConditioned(MetaEquivError, ValueError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class AssumptionViolated(MetaEquivError, ValueError):
    """Base for violations of the covariance regularity assumptions."""


class AssumptionA1Violated(AssumptionViolated):
    def __init__(self, message, which):
        super().__init__(message)
        self.which = which


class AssumptionA2Violated(AssumptionViolated):
    pass


class OmegaNotSpd(MetaEquivError, ValueError):
    pass


class MNotSpd(MetaEquivError, ArithmeticError):
    pass


class MaxIterationsExceeded(MetaEquivError, RuntimeError):
    def __init__(self, message, w_last, grad_norm):
        super().__init__(message)
        self.w_last = w_last
        self.grad_norm = grad_norm


class NonFiniteEncountered(MetaEquivError, FloatingPointError):
    pass
