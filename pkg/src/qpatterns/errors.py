"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Raised when an operation receives out-of-range or inconsistent input."""
