"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An input violates a documented precondition."""


class NumericalFailureError(RuntimeError):
    """A numerical routine failed to converge or produced garbage."""


class OutOfHypothesisError(InvalidInputError):
    """Inputs fall outside the validity region of a bound.

    Raised instead of extrapolating a formula beyond where it is proven.
    """


class ReplicationFailureError(NumericalFailureError):
    """A Monte Carlo replication failed; carries a reproducer.

    Failed replications are fatal rather than skipped, since silently
    dropping them would bias expectation estimates.
    """

    def __init__(self, message: str, *, index: int, seed_root: int,
                 labels: tuple[int, ...]):
        super().__init__(
            f"replication {index} failed (seed root={seed_root}, "
            f"labels={labels}): {message}"
        )
        self.index = index
        self.seed_root = seed_root
        self.labels = labels
