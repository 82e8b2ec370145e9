"""Enumeration of one-flip local optima by propagation and backtracking search.

Each variable carries exact bounds [expr_lo_i, expr_hi_i] on
expr_i = q_i + sum_j q_ij x_j under the current partial assignment: assigned
neighbors contribute their actual term, unassigned neighbors the worst case
(negative coefficients for the low bound, positive for the high bound). The
sign rules for local optimality then propagate:

  expr_lo_i > 0  forces x_i = 1      expr_hi_i < 0  forces x_i = 0

and an assigned variable whose bound contradicts its value is a conflict.
Every solution found is blocked with a no-good clause, so search continues
to new solutions and, given no budget, provably exhausts the space.

Two branching rules are available. The default, "hint-descent", follows a
cheap randomized descent endpoint as a value hint (solution-guided search):
each hint seeds a restart, the no-good store forces novel wiggles around
it, and after a few harvested solutions a fresh hint moves to a new region.
"max-commitment" branches on the variable with the most sign-committed
bounds and follows that sign with probability ``value_bias``; it needs no
hints but completes far more slowly on loosely constrained instances.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .budget import Budget, BudgetMeter
from .model import (
    LocalOptimaSet,
    QuboInstance,
    Solution,
    build_gain_state,
    is_one_flip_local_optimum,
    objective_value,
)


class VerificationError(RuntimeError):
    """An emitted assignment failed the local-optimality check (engine bug)."""


@dataclass(frozen=True)
class EnumerationConfig:
    """Enumerator knobs. Defaults mirror a top-500 extraction run.

    ``max_nodes`` counts budget units: one per propagation step and one per
    hint-descent flip, so seeded unit-budget runs are deterministic.
    ``hint_harvest`` is the number of solutions gathered around one hint
    before a fresh one is drawn. ``value_bias`` only affects the
    "max-commitment" rule.
    """

    top_k: int = 500
    max_nodes: int | None = None
    max_seconds: float | None = None
    seed: int = 0
    strict: bool = False
    branching: str = "hint-descent"
    hint_harvest: int = 8
    value_bias: float = 0.8
    restart_interval_factor: int = 10
    restart_growth: float = 2.0

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise ValueError("node budget must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("time budget must be positive")
        if self.branching not in ("hint-descent", "max-commitment"):
            raise ValueError(f"unknown branching rule {self.branching!r}")
        if self.hint_harvest < 1:
            raise ValueError("hint harvest must be >= 1")
        if not 0.0 <= self.value_bias <= 1.0:
            raise ValueError("value bias must be in [0, 1]")
        if self.restart_interval_factor < 1:
            raise ValueError("restart interval factor must be >= 1")
        if self.restart_growth < 1.0:
            raise ValueError("restart growth must be >= 1")


class _Nogood:
    """Blocks one full assignment; two watched literals keep it lazy."""

    __slots__ = ("bits", "w1", "w2")

    def __init__(self, bits: tuple[int, ...], w1: int, w2: int):
        self.bits = bits
        self.w1 = w1
        self.w2 = w2


UNASSIGNED = -1


class SearchState:
    """Partial assignment plus exact expr bounds, trail, and no-good store."""

    def __init__(self, instance: QuboInstance, strict: bool = False):
        self.instance = instance
        self.strict = strict
        n = instance.n
        self.assignment = [UNASSIGNED] * n
        # Per-edge positive/negative parts, precomputed for bound updates.
        self._adj: list[list[tuple[int, int, int, int]]] = [[] for _ in range(n)]
        for i in range(n):
            for j, q in instance.adjacency[i]:
                self._adj[i].append((j, q, min(q, 0), max(q, 0)))
        self.expr_lo = list(instance.linear)
        self.expr_hi = list(instance.linear)
        for i in range(n):
            for _, _, qlo, qhi in self._adj[i]:
                self.expr_lo[i] += qlo
                self.expr_hi[i] += qhi
        self.trail: list[int] = []
        self._trail_pos = [UNASSIGNED] * n
        self.nogoods: list[_Nogood] = []
        self._watches: dict[tuple[int, int], list[_Nogood]] = {}
        self._dirty: deque[int] = deque(range(n))
        self._forced: deque[tuple[int, int]] = deque()
        self._conflict = False
        self.unassigned_count = n

    # -- assignment & undo ------------------------------------------------

    def mark(self) -> int:
        return len(self.trail)

    def assign(self, i: int, value: int) -> None:
        """Set x_i := value and schedule consequences for propagate()."""
        if self.assignment[i] != UNASSIGNED:
            raise ValueError(f"variable {i} already assigned")
        if value not in (0, 1):
            raise ValueError(f"binary value expected, got {value!r}")
        self._do_assign(i, value)

    def _do_assign(self, i: int, value: int) -> None:
        self.assignment[i] = value
        self._trail_pos[i] = len(self.trail)
        self.trail.append(i)
        self.unassigned_count -= 1
        for j, q, qlo, qhi in self._adj[i]:
            term = q * value
            self.expr_lo[j] += term - qlo
            self.expr_hi[j] += term - qhi
            self._dirty.append(j)
        self._dirty.append(i)
        self._visit_watches(i, value)

    def undo_to(self, mark: int) -> None:
        """Pop trail entries down to the mark; clears pending deductions.

        Safe only for marks taken at a propagation fixpoint (the engine
        records marks right before decisions); use redo_root_deductions()
        after unwinding all the way to the root.
        """
        while len(self.trail) > mark:
            i = self.trail.pop()
            value = self.assignment[i]
            self.assignment[i] = UNASSIGNED
            self._trail_pos[i] = UNASSIGNED
            self.unassigned_count += 1
            for j, q, qlo, qhi in self._adj[i]:
                term = q * value
                self.expr_lo[j] -= term - qlo
                self.expr_hi[j] -= term - qhi
        self._dirty.clear()
        self._forced.clear()
        self._conflict = False

    def redo_root_deductions(self) -> None:
        """Re-queue every variable; the root is not a propagation fixpoint."""
        self._dirty.extend(range(self.instance.n))

    # -- no-goods ----------------------------------------------------------

    def add_nogood(self, bits: tuple[int, ...]) -> None:
        """Block a fully assigned solution. Call only when assignment == bits."""
        n = self.instance.n
        if n == 1:
            clause = _Nogood(bits, 0, 0)
        else:
            # Watch the two deepest-assigned literals: they unassign first on
            # backtrack, preserving the watched-literal invariant.
            order = sorted(range(n), key=lambda v: self._trail_pos[v], reverse=True)
            clause = _Nogood(bits, order[0], order[1])
        self.nogoods.append(clause)
        for w in {clause.w1, clause.w2}:
            self._watches.setdefault((w, bits[w]), []).append(clause)

    def _visit_watches(self, i: int, value: int) -> None:
        watchers = self._watches.get((i, value))
        if not watchers:
            return
        still_watching: list[_Nogood] = []
        for clause in watchers:
            if self._conflict:
                still_watching.append(clause)
                continue
            other = clause.w2 if clause.w1 == i else clause.w1
            # Try to move this watch to a literal that is not (yet) matched.
            moved = False
            for v in range(self.instance.n):
                if v == other or v == i:
                    continue
                if self.assignment[v] != clause.bits[v]:  # unassigned or mismatched
                    if clause.w1 == i:
                        clause.w1 = v
                    else:
                        clause.w2 = v
                    self._watches.setdefault((v, clause.bits[v]), []).append(clause)
                    moved = True
                    break
            if moved:
                continue
            still_watching.append(clause)
            other_state = self.assignment[other]
            if other_state == UNASSIGNED:
                self._forced.append((other, 1 - clause.bits[other]))
            elif other_state == clause.bits[other]:
                self._conflict = True  # assignment replicates the blocked solution
        self._watches[(i, value)] = still_watching

    # -- propagation -------------------------------------------------------

    def _force_value(self, i: int) -> int:
        """Value forced for unassigned i by its bounds, or UNASSIGNED."""
        if self.strict:
            if self.expr_lo[i] >= 0 and self.expr_hi[i] <= 0:
                return -2  # both values impossible
            if self.expr_lo[i] >= 0:
                return 1
            if self.expr_hi[i] <= 0:
                return 0
        else:
            if self.expr_lo[i] > 0:
                return 1
            if self.expr_hi[i] < 0:
                return 0
        return UNASSIGNED

    def _violates(self, i: int) -> bool:
        value = self.assignment[i]
        if self.strict:
            if value == 1:
                return self.expr_hi[i] <= 0
            return self.expr_lo[i] >= 0
        if value == 1:
            return self.expr_hi[i] < 0
        return self.expr_lo[i] > 0

    def propagate(self) -> bool:
        """Run sign-rule and no-good propagation to fixpoint.

        Returns True when consistent, False on conflict (a normal outcome).
        All deductions are pushed on the trail and undone by undo_to().
        """
        while not self._conflict and (self._dirty or self._forced):
            while self._forced and not self._conflict:
                i, value = self._forced.popleft()
                state = self.assignment[i]
                if state == UNASSIGNED:
                    self._do_assign(i, value)
                elif state != value:
                    self._conflict = True
            if self._conflict or not self._dirty:
                continue
            i = self._dirty.popleft()
            if self.assignment[i] == UNASSIGNED:
                forced = self._force_value(i)
                if forced == -2:
                    self._conflict = True
                elif forced != UNASSIGNED:
                    self._do_assign(i, forced)
            elif self._violates(i):
                self._conflict = True
        if self._conflict:
            self._dirty.clear()
            self._forced.clear()
            return False
        return True

    # -- inspection ----------------------------------------------------------

    def is_complete(self) -> bool:
        return self.unassigned_count == 0

    def bits(self) -> tuple[int, ...]:
        if not self.is_complete():
            raise ValueError("assignment is not complete")
        return tuple(self.assignment)

    def big_m(self, i: int) -> int:
        """Tight per-row big-M: |q_i| + sum_j |q_ij| + 1."""
        total = abs(self.instance.linear[i]) + 1
        for _, q in self.instance.adjacency[i]:
            total += abs(q)
        return total


def _descent_hint(
    instance: QuboInstance, rng: random.Random, meter: BudgetMeter
) -> list[int]:
    """Randomized first-improvement descent endpoint, used as a value hint.

    Flips are charged to the budget meter. The hint only orders values
    (propagation and no-goods overrule it), so it need not be an optimum
    itself, e.g. under strict mode or budget expiry mid-descent.
    """
    bits = [rng.randrange(2) for _ in range(instance.n)]
    state = build_gain_state(instance, bits)
    order = list(range(instance.n))
    improved = True
    while improved and not meter.exhausted():
        rng.shuffle(order)
        improved = False
        for i in order:
            if (1 - 2 * state.bits[i]) * state.expr[i] > 0:
                state.apply_flip(i)
                meter.tick()
                improved = True
    return list(state.bits)


def enumerate_local_optima(instance: QuboInstance, config: EnumerationConfig) -> LocalOptimaSet:
    """Depth-first enumeration with propagation, no-good blocking and restarts.

    Runs to exhaustion when no budget is set, otherwise stops at budget
    expiry. Every emitted solution is re-verified against the optimality
    predicate; a failure raises VerificationError. Output is deduplicated,
    sorted by descending objective (ties by lexicographic bits) and
    truncated to ``top_k``.
    """
    n = instance.n
    if n == 0:
        return LocalOptimaSet([Solution(bits=(), objective=0)])
    rng = random.Random(config.seed)
    meter = Budget(max_units=config.max_nodes, max_seconds=config.max_seconds).start()
    state = SearchState(instance, strict=config.strict)
    found: dict[tuple[int, ...], int] = {}
    # Stack entries: [variable, value currently tried, other value exhausted, trail mark].
    stack: list[list[int]] = []
    failed_nodes = 0
    restart_interval = config.restart_interval_factor * n
    hint_mode = config.branching == "hint-descent"
    var_order = list(range(n))
    hint: list[int] = []
    harvested = 0

    def refresh_hint() -> None:
        nonlocal hint, harvested
        if hint_mode:
            hint = _descent_hint(instance, rng, meter)
            rng.shuffle(var_order)
        harvested = 0

    def restart() -> None:
        state.undo_to(0)
        state.redo_root_deductions()
        stack.clear()

    def pick_decision() -> tuple[int, int]:
        if hint_mode:
            var = next(i for i in var_order if state.assignment[i] == UNASSIGNED)
            return var, hint[var]
        best_var = -1
        best_score = -1
        for i in range(n):
            if state.assignment[i] == UNASSIGNED:
                score = abs(state.expr_lo[i] + state.expr_hi[i])
                if score > best_score:
                    best_var = i
                    best_score = score
        center = state.expr_lo[best_var] + state.expr_hi[best_var]
        if center > 0:
            preferred = 1
        elif center < 0:
            preferred = 0
        else:
            preferred = rng.randrange(2)
        value = preferred if rng.random() < config.value_bias else 1 - preferred
        return best_var, value

    refresh_hint()
    while not meter.exhausted():
        consistent = state.propagate()
        meter.tick()
        if consistent and state.is_complete():
            bits = state.bits()
            if not is_one_flip_local_optimum(instance, bits, strict=config.strict):
                raise VerificationError(
                    f"propagation produced a non-optimal assignment {bits}"
                )
            if bits not in found:
                found[bits] = objective_value(instance, bits)
            state.add_nogood(bits)
            harvested += 1
            if stack:
                # Restart for the next solution: with hints this lands on or
                # near the (fresh or partially harvested) hint cheaply, and
                # every pass keeps starting at the root, so an exhausted
                # stack below still proves full coverage.
                restart()
                if harvested >= config.hint_harvest:
                    refresh_hint()
                continue
            consistent = False  # n forced variables; fall through to backtracking
        elif not consistent:
            failed_nodes += 1
        if consistent:
            var, value = pick_decision()
            stack.append([var, value, False, state.mark()])
            state.assign(var, value)
            continue
        if failed_nodes >= restart_interval and stack:
            restart()
            refresh_hint()
            failed_nodes = 0
            restart_interval = max(
                restart_interval + 1, int(restart_interval * config.restart_growth)
            )
            continue
        while stack:
            var, value, exhausted, mark_at = stack[-1]
            state.undo_to(mark_at)
            if exhausted:
                stack.pop()
                continue
            stack[-1][1] = 1 - value
            stack[-1][2] = True
            state.assign(var, 1 - value)
            break
        else:
            break  # a full pass from the root covered everything

    solutions = [Solution(bits=bits, objective=obj) for bits, obj in found.items()]
    solutions.sort(key=lambda s: (-s.objective, s.bits))
    return LocalOptimaSet(solutions[: config.top_k])


def diversity_report(optima: LocalOptimaSet) -> tuple[Fraction, Fraction]:
    """(mean pairwise Hamming distance, mean objective) of a solution set."""
    return optima.mean_pairwise_distance(), optima.mean_objective()


def export_big_m_model(instance: QuboInstance) -> str:
    """LP-format text of the big-M linear form of the optimality conditions.

    Row i contributes two constraints with M_i = |q_i| + sum_j |q_ij| + 1:

        sum_j q_ij x_j - M_i x_i <= -q_i
        sum_j q_ij x_j - M_i x_i >= -q_i - M_i

    Useful for cross-checking the enumerator against a third-party solver.
    """
    if instance.n == 0:
        raise ValueError("cannot export an empty instance")
    state = SearchState(instance)
    lines = [
        "\\ Big-M linear form of the one-flip local-optimality conditions",
        "\\ Feasible binary points = one-flip local optima (non-strict)",
        "Maximize",
        " obj: 0 x0",
        "Subject To",
    ]
    for i in range(instance.n):
        m_i = state.big_m(i)
        terms = []
        for j, q in instance.adjacency[i]:
            terms.append(f"{'+' if q >= 0 else '-'} {abs(q)} x{j}")
        terms.append(f"- {m_i} x{i}")
        body = " ".join(terms).lstrip("+ ")
        lines.append(f" up_{i}: {body} <= {-instance.linear[i]}")
        lines.append(f" dn_{i}: {body} >= {-instance.linear[i] - m_i}")
    lines.append("Binary")
    lines.append(" " + " ".join(f"x{i}" for i in range(instance.n)))
    lines.append("End")
    return "\n".join(lines) + "\n"
