"""Shared exception types. The CLI maps these onto exit codes 2 and 3."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class BudgetError(RuntimeError):
    """A table or loop would exceed the configured memory/work budget."""
