class InvalidInput(ValueError):
    """Raised when an operation's precondition on its arguments fails."""


class NotDownwardClosed(InvalidInput):
    pass
