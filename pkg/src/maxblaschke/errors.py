"""Exception types shared across the package.

Two failure families matter to callers: bad inputs (rejected before any
numerics run) and numerical breakdowns (a computation started and could not
be completed to tolerance).  The command-line driver maps them to distinct
exit codes.
"""


class InputError(ValueError):
    """Invalid input: constraint violations caught before computation."""


class NumericalError(RuntimeError):
    """A solver or numerical routine failed to reach its tolerance."""
