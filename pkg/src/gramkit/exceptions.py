"""Exception hierarchy for gramkit."""


class GramkitError(Exception):
    """Base class for all gramkit errors."""


class DimensionError(GramkitError, ValueError):
    """Raised when operand shapes do not fit together."""


class NonFiniteError(GramkitError, ValueError):
    """Raised when an input contains NaN or infinite entries."""


class PreconditionError(GramkitError, ValueError):
    """Raised when the hypotheses of an operation are not met.

    Differs from :class:`TheoremViolation` in that the inputs are fine but
    the operation is not applicable to them (singular Gram matrix, a
    sequence that is not a dual, a lemma whose assumptions fail, ...).
    """


class ConvergenceError(PreconditionError):
    """Raised when a Neumann series is not guaranteed to converge."""


class TheoremViolation(GramkitError):
    """Raised when an identity that must hold under verified hypotheses fails.

    This signals an internal consistency failure (a bug or a numerically
    hopeless input), never an ordinary negative answer.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class FormatError(GramkitError, ValueError):
    """Raised when a matrix or frame file does not match its schema."""
