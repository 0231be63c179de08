"""Error types shared across the package."""


class HypothesisError(ValueError):
    """A stated hypothesis of an operation is violated.

    ``condition`` names the failed hypothesis so callers (and reports) can
    attribute the failure.
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        self.detail = detail
        msg = f"hypothesis violated: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class AliasingError(ValueError):
    """Grid too small for the polynomial's (recentred) degree."""


class SupportError(ValueError):
    """Coefficient support does not have the block structure an operation needs."""


class CollisionError(ValueError):
    """A generator produced colliding elements; carries the colliding index pairs."""

    def __init__(self, collisions):
        self.collisions = list(collisions)
        super().__init__(f"{len(self.collisions)} colliding value(s): "
                         f"{self.collisions[:5]}{'...' if len(self.collisions) > 5 else ''}")


class MemoryBudgetError(RuntimeError):
    """Requested sample grid exceeds the configured memory budget."""

    def __init__(self, needed_grid, needed_bytes: int, budget_bytes: int):
        self.needed_grid = tuple(int(n) for n in needed_grid)
        self.needed_bytes = int(needed_bytes)
        self.budget_bytes = int(budget_bytes)
        super().__init__(
            f"grid {self.needed_grid} needs {self.needed_bytes} bytes of samples, "
            f"budget is {self.budget_bytes} (raise EXPSUMS_MEMORY_BUDGET or the "
            f"memory_budget argument)")
