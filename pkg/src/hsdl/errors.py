"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent user input (dimension mismatch, bad descriptor)."""


class PreconditionError(InputError):
    """An operation's mathematical precondition is violated (e.g. 0 not interior)."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget.

    Carries the best iterate and its residual so callers can salvage a
    partial answer.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
