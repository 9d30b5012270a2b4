"""Exception hierarchy.

Everything raised on bad input derives from :class:`PreconditionError` so the
CLI can map it to exit code 2 in one place.
"""


class InoculationError(Exception):
    pass


class PreconditionError(InoculationError, ValueError):
    """Input violates an operation's precondition."""


class NotATreeError(PreconditionError):
    pass


class EnumerationCapError(PreconditionError):
    """Exact enumeration would exceed the configured size cap."""


class InfeasibleError(PreconditionError):
    pass


class SeparatorError(InoculationError):
    """A separator oracle returned a set that does not balance its part."""


class ConvergenceError(InoculationError):
    def __init__(self, message, rounds=None, switches=None):
        super().__init__(message)
        self.rounds = rounds
        self.switches = switches


class BracketError(InoculationError):
    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = samples or []
