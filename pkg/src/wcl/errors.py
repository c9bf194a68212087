class WCLError(Exception):
    """Base class for library errors."""


class InvalidElementError(WCLError, ValueError):
    pass


class InvalidWeightError(WCLError, ValueError):
    pass


class ParameterError(WCLError, ValueError):
    """Arguments outside an operation's admissible range."""


class BudgetExceededError(WCLError, RuntimeError):
    pass


class GroupMismatchError(WCLError, ValueError):
    pass
