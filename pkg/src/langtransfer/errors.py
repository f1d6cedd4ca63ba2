"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ValidationError -> 1, InputError -> 2,
InfeasibleError -> 3.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ToolkitError):
    """Inputs violate a documented contract (bad values, bad schema)."""


class InputError(ToolkitError):
    """I/O level failure: missing files, undecodable bytes."""


class InfeasibleError(ToolkitError):
    """A selection request cannot be satisfied with the available languages."""
