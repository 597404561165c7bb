"""Exception types shared across the package."""


class BudgetError(ValueError):
    """A requested computation exceeds a configured size cap."""


class AuditError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
