"""Shared exception types.

Plain ``ValueError`` is used for invalid arguments everywhere; the classes
below mark failure modes a caller may want to catch separately.
"""


class ResolutionError(ValueError):
    """Requested scale cannot be represented on the current grid or step."""


class InstabilityError(RuntimeError):
    """Time stepping produced non-finite values."""


class DegenerateInputError(ValueError):
    """Input is degenerate for the requested diagnostic (e.g. zero norm)."""
