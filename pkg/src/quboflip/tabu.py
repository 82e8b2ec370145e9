"""One-flip tabu search with path relinking, plus the greedy-restart sampler.

The tabu engine follows the backtracking flavor of search: the best
non-tabu improving flip is applied and given a tenure; when only tabu moves
would improve, or no move improves at all (a local optimum, which gets
recorded as a checkpoint), recent flips are undone from a history stack.
Budgets count iterations (one flip, undo batch, or kick per iteration), so
seeded runs are fully deterministic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .budget import Budget
from .model import (
    GainState,
    LocalOptimaSet,
    QuboInstance,
    Solution,
    build_gain_state,
    objective_value,
)


class EliteSet:
    """Bounded set of distinct solutions kept sorted by descending objective."""

    def __init__(self, capacity: int = 10):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._members: list[Solution] = []
        self._seen: set[tuple[int, ...]] = set()

    @classmethod
    def from_local_optima(cls, optima: LocalOptimaSet, capacity: int = 10) -> "EliteSet":
        elite = cls(capacity)
        for sol in optima.sorted_by_objective():
            elite.add(sol)
        return elite

    def add(self, solution: Solution) -> bool:
        """Insert keeping order; returns False for duplicates or rejects."""
        if solution.bits in self._seen:
            return False
        if len(self._members) >= self.capacity and solution.objective <= self._members[-1].objective:
            return False
        lo, hi = 0, len(self._members)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._members[mid].objective >= solution.objective:
                lo = mid + 1
            else:
                hi = mid
        self._members.insert(lo, solution)
        self._seen.add(solution.bits)
        if len(self._members) > self.capacity:
            dropped = self._members.pop()
            self._seen.discard(dropped.bits)
        return True

    @property
    def members(self) -> list[Solution]:
        return list(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self):
        return iter(self._members)

    def __getitem__(self, index: int) -> Solution:
        return self._members[index]


@dataclass(frozen=True)
class TabuParams:
    """Tabu-search knobs; defaults are standard one-flip QUBO settings."""

    tenure_base: int = 10
    tenure_span: int | None = None  # None -> ceil(n / 50)
    backtrack_depth: int = 20
    aspiration: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tenure_base < 0:
            raise ValueError("tenure base must be non-negative")
        if self.tenure_span is not None and self.tenure_span < 0:
            raise ValueError("tenure span must be non-negative")
        if self.backtrack_depth < 1:
            raise ValueError("backtrack depth must be >= 1")


@dataclass
class TabuResult:
    """Outcome of a tabu run: best solution plus audit data."""

    best: Solution
    checkpoints: list[Solution]
    iterations: int


def greedy_descent(instance: QuboInstance, start: Solution) -> Solution:
    """Apply the best strictly improving flip (ties by lowest index) until none."""
    state = build_gain_state(instance, start.bits)
    n = instance.n
    while True:
        best_i = -1
        best_delta = 0
        for i in range(n):
            delta = (1 - 2 * state.bits[i]) * state.expr[i]
            if delta > best_delta:
                best_i = i
                best_delta = delta
        if best_i < 0:
            return state.solution()
        state.apply_flip(best_i)


def sample_greedy_restarts(
    instance: QuboInstance, budget: Budget, top_k: int, seed: int
) -> LocalOptimaSet:
    """Random starts improved to local optimality; top-k by objective.

    One budget unit per applied flip and one per restart. The result is
    deduplicated and canonically sorted (descending objective, then bits).
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    rng = random.Random(seed)
    meter = budget.start()
    n = instance.n
    found: dict[tuple[int, ...], int] = {}
    while not meter.exhausted():
        bits = [rng.randrange(2) for _ in range(n)]
        meter.tick()
        state = build_gain_state(instance, bits)
        while not meter.exhausted():
            best_i = -1
            best_delta = 0
            for i in range(n):
                delta = (1 - 2 * state.bits[i]) * state.expr[i]
                if delta > best_delta:
                    best_i = i
                    best_delta = delta
            if best_i < 0:
                found.setdefault(tuple(state.bits), state.objective)
                break
            state.apply_flip(best_i)
            meter.tick()
    solutions = [Solution(bits=b, objective=o) for b, o in found.items()]
    solutions.sort(key=lambda s: (-s.objective, s.bits))
    return LocalOptimaSet(solutions[:top_k])


def path_relink(instance: QuboInstance, a: Solution, b: Solution) -> Solution:
    """Greedy walk from a to b over the difference bits; best point on the path.

    Each step flips the difference bit with the largest objective delta
    (ties by lowest index), so exactly |difference set| intermediate
    solutions are visited; endpoints count as path points.
    """
    if len(a.bits) != len(b.bits):
        raise ValueError("solutions have different lengths")
    state = build_gain_state(instance, a.bits)
    best_bits = tuple(state.bits)
    best_objective = state.objective
    diff = [i for i in range(instance.n) if a.bits[i] != b.bits[i]]
    while diff:
        best_pos = 0
        best_delta = None
        for pos, i in enumerate(diff):
            delta = (1 - 2 * state.bits[i]) * state.expr[i]
            if best_delta is None or delta > best_delta:
                best_pos = pos
                best_delta = delta
        i = diff.pop(best_pos)
        state.apply_flip(i)
        if state.objective > best_objective:
            best_objective = state.objective
            best_bits = tuple(state.bits)
    return Solution(bits=best_bits, objective=best_objective)


def _tenure_draw(rng: random.Random, params: TabuParams, n: int) -> int:
    span = params.tenure_span if params.tenure_span is not None else math.ceil(n / 50)
    return params.tenure_base + (rng.randint(0, span) if span > 0 else 0)


def _tabu_core(
    instance: QuboInstance,
    elite: EliteSet,
    budget: Budget,
    params: TabuParams,
    scoring: QuboInstance | None,
) -> TabuResult:
    if len(elite) == 0:
        raise ValueError("elite set is empty")
    if scoring is not None and scoring.n != instance.n:
        raise ValueError("search and scoring instances have different sizes")
    n = instance.n
    rng = random.Random(params.seed)
    meter = budget.start()

    if len(elite) >= 2:
        ia, ib = rng.sample(range(len(elite)), 2)
        start = path_relink(instance, elite[ia], elite[ib])
    else:
        member = elite[0]
        start = Solution(bits=member.bits, objective=objective_value(instance, member.bits))

    state = build_gain_state(instance, start.bits)
    score_state = build_gain_state(scoring, start.bits) if scoring is not None else None

    # Best-so-far seeds from elite and start, so the result never regresses
    # below them. best_objective guides the search (and aspiration); the
    # scored pair tracks the returned solution.
    best_objective = state.objective
    best_bits = tuple(state.bits)
    for member in elite:
        obj = objective_value(instance, member.bits)
        if obj > best_objective:
            best_objective = obj
            best_bits = member.bits
    if score_state is not None:
        best_score = score_state.objective
        best_score_bits = tuple(score_state.bits)
        for member in elite:
            obj = objective_value(scoring, member.bits)
            if obj > best_score:
                best_score = obj
                best_score_bits = member.bits
    else:
        best_score = best_objective
        best_score_bits = best_bits

    tenure_until = [0] * n
    history: list[int] = []
    checkpoints: list[Solution] = []
    iteration = 0

    def do_flip(i: int) -> None:
        state.apply_flip(i)
        if score_state is not None:
            score_state.apply_flip(i)

    while not meter.exhausted():
        iteration += 1
        meter.tick()
        best_i = -1
        best_delta = 0
        any_improving = False
        for i in range(n):
            delta = (1 - 2 * state.bits[i]) * state.expr[i]
            if delta <= 0:
                continue
            any_improving = True
            allowed = tenure_until[i] <= iteration or (
                params.aspiration and state.objective + delta > best_objective
            )
            if allowed and delta > best_delta:
                best_i = i
                best_delta = delta
        if best_i >= 0:
            do_flip(best_i)
            history.append(best_i)
            tenure_until[best_i] = iteration + _tenure_draw(rng, params, n)
            if state.objective > best_objective:
                best_objective = state.objective
                best_bits = tuple(state.bits)
                if score_state is None:
                    best_score = best_objective
                    best_score_bits = best_bits
            if score_state is not None and score_state.objective > best_score:
                best_score = score_state.objective
                best_score_bits = tuple(score_state.bits)
            continue
        if not any_improving:
            checkpoints.append(state.solution())
        steps = min(len(history), params.backtrack_depth)
        if steps > 0:
            for _ in range(steps):
                i = history.pop()
                do_flip(i)  # flips are involutions, so this undoes
                tenure_until[i] = iteration + _tenure_draw(rng, params, n)
        else:
            # Nothing to undo: take the least-bad non-tabu move as a kick.
            candidates = [i for i in range(n) if tenure_until[i] <= iteration] or list(range(n))
            kick = max(
                candidates,
                key=lambda i: ((1 - 2 * state.bits[i]) * state.expr[i], -i),
            )
            do_flip(kick)
            history.append(kick)
            tenure_until[kick] = iteration + _tenure_draw(rng, params, n)

    return TabuResult(
        best=Solution(bits=best_score_bits, objective=best_score),
        checkpoints=checkpoints,
        iterations=iteration,
    )


def tabu_search(
    instance: QuboInstance, elite: EliteSet, budget: Budget, params: TabuParams
) -> TabuResult:
    """Tabu search from a path-relinked elite start; best-so-far never regresses.

    The reported objective is always >= the best objective in the elite set.
    """
    return _tabu_core(instance, elite, budget, params, scoring=None)


def run_variant(
    instance_base: QuboInstance,
    instance_search: QuboInstance,
    elite: EliteSet,
    budget: Budget,
    params: TabuParams,
) -> TabuResult:
    """Search guided by a transformed matrix, scored against the base matrix.

    Moves are evaluated on ``instance_search`` (Q1 or Q2); every visited
    candidate is re-scored incrementally against ``instance_base`` and the
    best base-objective solution is returned. Checkpoints are local optima
    of the search instance.
    """
    return _tabu_core(instance_search, elite, budget, params, scoring=instance_base)
