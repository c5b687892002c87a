"""Exception and warning types shared by all modules."""


class TwistorFillError(Exception):
    """Base class for every error raised by this package."""


class ConstraintViolation(TwistorFillError):
    """Input does not satisfy the linear constraints an operation requires.

    ``violations`` lists ``(name, position, value)`` triples describing the
    failed constraint equations.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class Obstructed(TwistorFillError):
    """The hessian problem has no solution; ``report`` says where it fails."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NegativeFourierContent(TwistorFillError):
    """A series expected to be nonnegatively supported has k < 0 modes."""

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = dict(offending)


class SingularLevi(TwistorFillError):
    """The Levi matrix of a boundary problem is not invertible."""


class TruncationOverflow(TwistorFillError):
    """A correction term needs modes beyond the configured band."""


class UnsupportedBundle(TwistorFillError):
    """The requested bundle is not among the supported models."""


class AliasingWarning(UserWarning):
    """Energy above the resolved band exceeds the tolerance."""
