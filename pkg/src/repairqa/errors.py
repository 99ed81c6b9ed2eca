"""Exception types shared across the package."""


class CapacityError(ValueError):
    """A configurable size cap was exceeded (encoding or enumeration)."""


class BudgetExceededError(RuntimeError):
    """The solver ran out of its conflict budget; distinct from UNSAT."""


class PairingError(ValueError):
    """Requested semantics/algorithm combination is invalid."""


class InputError(ValueError):
    """An input file failed to parse or validate."""
