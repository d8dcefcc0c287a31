"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the region where an operation is defined.

    The message names the violated constraint (e.g. ``"x>0"``).
    """


class DivergenceError(DomainError):
    """A Monte Carlo path left the guarded region."""
