"""Exception types shared across the package."""


class KglabError(Exception):
    """Base class for all package errors."""


class ValidationError(KglabError, ValueError):
    """An argument is outside its documented range."""


class CapExceeded(KglabError, RuntimeError):
    """A configured memory or state-space cap would be exceeded."""


class PrecisionError(KglabError, RuntimeError):
    """A boundary decision could not be resolved even at maximal precision."""


class ConsistencyError(KglabError, RuntimeError):
    """An internal cross-check failed (these should never fire)."""


class DominationError(KglabError, ValueError):
    """A sieve weight pair does not dominate the prime indicator."""


class MinorArcError(KglabError, ValueError):
    """A major-arc-only operation was called at a minor-arc frequency."""
