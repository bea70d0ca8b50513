"""Exception hierarchy shared by every module.

The CLI maps ``ArgumentError``/``RangeError`` to exit code 2 and
``CapacityError`` to exit code 3.
"""


class FriableError(Exception):
    pass


class ArgumentError(FriableError, ValueError):
    """Malformed or inconsistent input."""


class RangeError(ArgumentError, IndexError):
    """Query outside the range covered by a table or window."""


class CapacityError(FriableError):
    """Request exceeds a memory, enumeration or overflow budget."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required
