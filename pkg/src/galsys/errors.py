"""Exception hierarchy shared by every module."""


class GalsysError(Exception):
    """Base class for all errors raised by galsys."""


class UsageError(GalsysError, ValueError):
    """The caller passed arguments that violate an operation's precondition."""


class InvariantError(GalsysError, ValueError):
    """A data structure failed one of its declared invariants."""


class ResourceCapError(GalsysError):
    """An enumeration would exceed a configured cap."""

    def __init__(self, cap: str, limit: int, requested: int):
        self.cap = cap
        self.limit = limit
        self.requested = requested
        super().__init__(f"cap '{cap}' exceeded: {requested} > {limit}")


class SpecError(GalsysError, ValueError):
    """A spec document is malformed; ``path`` locates the offending node."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")
