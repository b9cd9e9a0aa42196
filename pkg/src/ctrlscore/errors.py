"""Exception hierarchy shared by all modules.

Two families are distinguished so that callers (and the command line) can
tell bad input apart from numerical breakdown.
"""


class CtrlScoreError(Exception):
    """Base class for every error raised by ctrlscore."""


class ValidationError(CtrlScoreError, ValueError):
    """Input violates a documented precondition (shape, range, format)."""


class NumericalError(CtrlScoreError, ArithmeticError):
    """A computation broke down (blow-up, singular operator, no descent)."""


class AssumptionViolation(NumericalError):
    """A structural assumption needed by an algorithm does not hold."""


class NotControllableError(NumericalError):
    """The assembled Gramian is not positive definite."""
