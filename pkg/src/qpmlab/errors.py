"""Exception hierarchy shared by the solvers and the CLI."""


class QpmError(Exception):
    """Base class for library errors."""


class DomainError(QpmError, ValueError):
    """Input outside the domain where a model or formula is defined."""


class SolverError(QpmError):
    """A root search found no root, or more roots than the caller allows."""

    def __init__(self, message, brackets=()):
        super().__init__(message)
        self.brackets = list(brackets)


class ConvergenceError(SolverError):
    pass


class InfeasibleProcess(QpmError):
    """The requested process cannot be quasi-phase-matched with a positive period."""


class OutOfTuningRange(SolverError):
    """No signal/idler pair phase-matches at this temperature."""


class OpenSupportError(QpmError, ValueError):
    """A curve does not fall below half maximum on one side of its peak."""

    def __init__(self, message, side):
        super().__init__(message)
        self.side = side


class EmptySupportError(QpmError, ValueError):
    pass
