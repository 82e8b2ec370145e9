"""Search budgets: deterministic unit counts and/or wall-clock seconds."""

from __future__ import annotations

import time
from dataclasses import dataclass


@dataclass(frozen=True)
class Budget:
    """Limit on search effort.

    ``max_units`` counts deterministic elementary steps (nodes, flips,
    iterations; each engine documents its unit). ``max_seconds`` is a
    wall-clock cap. Either may be None; with both None the budget never
    expires, which is only sensible for exhaustive runs.
    """

    max_units: int | None = None
    max_seconds: float | None = None

    def __post_init__(self) -> None:
        if self.max_units is not None and self.max_units <= 0:
            raise ValueError("max_units must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")

    def start(self) -> "BudgetMeter":
        return BudgetMeter(self)


class BudgetMeter:
    """Running counter against a Budget."""

    def __init__(self, budget: Budget):
        self.budget = budget
        self.units = 0
        self._t0 = time.monotonic()

    def tick(self, units: int = 1) -> None:
        self.units += units

    def exhausted(self) -> bool:
        if self.budget.max_units is not None and self.units >= self.budget.max_units:
            return True
        if self.budget.max_seconds is not None:
            return time.monotonic() - self._t0 >= self.budget.max_seconds
        return False
