"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """Raised for inconsistent or out-of-range inputs (CLI exit code 2)."""


class NumericalError(RuntimeError):
    """Raised when an integration or eigensolve fails (CLI exit code 3)."""
