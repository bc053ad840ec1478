"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input (bad letters, weights, scenario fields)."""


class SearchExhaustedError(RuntimeError):
    """A target was not reached within the configured search radius.

    Raised by word-length search when the budget runs out.  Says nothing
    about reachability beyond the radius.
    """


class ResourceCapError(RuntimeError):
    """An enumeration would exceed a configured size cap."""


class NumericError(ArithmeticError):
    """Floating point breakdown (overflow, non-finite matrix entries)."""
