"""Shared error types and enumeration budgets.

Exit-code discipline for the CLI hangs off these: BudgetExceededError maps to
exit status 2, PreconditionError (and its FormatError subclass) to exit 3.
"""

DEFAULT_BUDGET = 10**9


class BudgetExceededError(RuntimeError):
    """An exact search ran past its configured budget (never silently truncated)."""


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold for the given inputs."""


class FormatError(PreconditionError):
    """A textual input does not parse under the documented format."""


class Budget:
    """Mutable counter of candidate evaluations with a hard cap."""

    __slots__ = ("limit", "used")

    def __init__(self, limit=DEFAULT_BUDGET):
        if limit is None:
            limit = DEFAULT_BUDGET
        if limit <= 0:
            raise PreconditionError("budget must be positive")
        self.limit = int(limit)
        self.used = 0

    def spend(self, n=1):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                "enumeration budget exceeded (%d > %d candidate evaluations)"
                % (self.used, self.limit)
            )


def as_budget(budget):
    """Coerce an int, None, or Budget into a Budget instance."""
    if isinstance(budget, Budget):
        return budget
    return Budget(budget)
