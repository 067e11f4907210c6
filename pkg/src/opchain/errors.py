"""Exception hierarchy shared across the package."""


class OpchainError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OpchainError):
    """An operand is outside the domain where the operation is defined
    (negative argument to a real log, NaN input, overflowing exp, ...)."""


class UndefinedForm(OpchainError):
    """An indeterminate combination of infinities, e.g. inf - inf."""


class LevelBoundsError(OpchainError):
    """Operation level outside the configured bounds."""


class NoIdentity(OpchainError):
    """The requested level has no identity element."""


class NoInverse(OpchainError):
    """The requested level has no inverse in the requested carrier."""


class NoConvergence(OpchainError):
    """A limit evaluation did not converge; diagnostics are attached."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class Unsupported(OpchainError):
    """No closed form is available for the requested level."""


class UnsupportedNode(OpchainError):
    """An expression node kind with no rule for the requested operation."""


class UnboundVariable(OpchainError):
    """Evaluation reached a variable not bound in the environment."""
