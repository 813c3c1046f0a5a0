"""Exception types shared across the package."""


class GraphError(ValueError):
    """A graph description violates a structural requirement."""


class PreconditionError(ValueError):
    """An operation was invoked outside its contract."""


class InvariantViolation(RuntimeError):
    """A theorem-backed internal invariant failed.

    The keyword arguments are kept on the exception so a self-contained
    reproducer can be assembled by the verification harness.
    """

    def __init__(self, message, **witnesses):
        super().__init__(message)
        self.witnesses = witnesses


class RepresentativeNotFound(ValueError):
    """No quasistable twist exists inside the search box; enlarge the bound."""


class MultipleRepresentatives(InvariantViolation):
    """Two quasistable twists inside one search box (uniqueness broken)."""
