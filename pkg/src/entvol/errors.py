"""Exception types raised by entvol."""


class EntvolError(Exception):
    """Base class for all library errors."""


class DomainError(EntvolError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class DegenerateInputError(EntvolError, ValueError):
    """Input carries no usable information, e.g. an all-zero coefficient list."""


class ResourceError(EntvolError, MemoryError):
    """A request would exceed the configured size cap."""


class BracketError(EntvolError, RuntimeError):
    """A bisection predicate does not change sign across the bracket."""
