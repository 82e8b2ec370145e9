"""Canonical QUBO representation and exact one-flip machinery.

All coefficients are integers and all arithmetic is exact: Python ints never
overflow, so objective deltas, incremental gains and optimality checks are
bit-exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

PairKey = tuple[int, int]


def pair_key(i: int, j: int) -> PairKey:
    """Normalize an unordered index pair to (min, max)."""
    return (i, j) if i < j else (j, i)


@dataclass
class QuboInstance:
    """A maximization QUBO ``max x'Qx`` over binary x, in canonical sparse form.

    ``linear[i]`` holds the diagonal (linear) coefficient of x_i.
    ``pairs[(i, j)]`` with i < j holds the combined coefficient of the
    x_i*x_j product, i.e. the entry of the doubled upper-triangular matrix
    form. Instances are immutable once constructed and safe to share across
    threads; ``adjacency`` is derived at construction for O(degree) updates.
    """

    n: int
    linear: list[int]
    pairs: dict[PairKey, int]
    name: str | None = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("variable count must be non-negative")
        if len(self.linear) != self.n:
            raise ValueError(
                f"linear vector has length {len(self.linear)}, expected {self.n}"
            )
        self.linear = [int(v) for v in self.linear]
        canonical: dict[PairKey, int] = {}
        for key in sorted(self.pairs):
            i, j = key
            if i == j:
                raise ValueError(f"pair key {key} is diagonal; diagonal terms belong in linear")
            if not (0 <= i < j < self.n):
                raise ValueError(f"pair key {key} out of range for n={self.n}")
            value = int(self.pairs[key])
            if value == 0:
                raise ValueError(f"pair {key} stores a zero coefficient")
            canonical[(i, j)] = value
        self.pairs = canonical
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for (i, j), value in self.pairs.items():
            adjacency[i].append((j, value))
            adjacency[j].append((i, value))
        for row in adjacency:
            row.sort()
        self.adjacency = adjacency

    @classmethod
    def from_dense(cls, matrix, name: str | None = None) -> "QuboInstance":
        """Fold a dense square matrix into canonical form.

        Symmetric, lower- and upper-triangular layouts are all accepted: the
        combined coefficient of x_i*x_j is ``matrix[i, j] + matrix[j, i]``,
        so a symmetric matrix gets its off-diagonal entries doubled and an
        already-doubled upper-triangular matrix passes through unchanged.
        """
        arr = np.asarray(matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(arr)
            if not np.array_equal(arr, rounded):
                raise ValueError("coefficients must be integers")
            arr = rounded
        n = int(arr.shape[0])
        linear = [int(arr[i, i]) for i in range(n)]
        pairs: dict[PairKey, int] = {}
        for i in range(n):
            for j in range(i + 1, n):
                combined = int(arr[i, j]) + int(arr[j, i])
                if combined != 0:
                    pairs[(i, j)] = combined
        return cls(n=n, linear=linear, pairs=pairs, name=name)

    def to_dense(self) -> np.ndarray:
        """Dense doubled-upper-triangular matrix (diagonal = linear terms)."""
        out = np.zeros((self.n, self.n), dtype=np.int64)
        for i, v in enumerate(self.linear):
            out[i, i] = v
        for (i, j), v in self.pairs.items():
            out[i, j] = v
        return out

    def max_abs_coefficient(self) -> int:
        """Largest |coefficient| over linear and combined pair terms."""
        values = [abs(v) for v in self.linear]
        values.extend(abs(v) for v in self.pairs.values())
        return max(values, default=0)

    def negated(self) -> "QuboInstance":
        """The instance with every coefficient sign-flipped."""
        return QuboInstance(
            n=self.n,
            linear=[-v for v in self.linear],
            pairs={k: -v for k, v in self.pairs.items()},
            name=self.name,
        )


@dataclass(frozen=True)
class Solution:
    """A binary assignment with its (externally verified) objective value."""

    bits: tuple[int, ...]
    objective: int


def _validated_bits(instance: QuboInstance, bits: Sequence[int]) -> Sequence[int]:
    if len(bits) != instance.n:
        raise ValueError(f"bit vector has length {len(bits)}, expected {instance.n}")
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit vector contains non-binary value {b!r}")
    return bits


def objective_value(instance: QuboInstance, bits: Sequence[int]) -> int:
    """Evaluate x'Qx with canonical (combined) pair coefficients."""
    _validated_bits(instance, bits)
    total = 0
    for i, b in enumerate(bits):
        if b:
            total += instance.linear[i]
    for (i, j), q in instance.pairs.items():
        if bits[i] and bits[j]:
            total += q
    return total


@dataclass
class GainState:
    """Incremental one-flip state: bits, objective and every expr_i.

    ``expr[i] = q_i + sum_j q_ij * bits[j]`` over neighbors j of i, so the
    objective change of flipping bit i is ``(1 - 2*bits[i]) * expr[i]``.
    Single-owner mutable value; never share one across threads.
    """

    instance: QuboInstance
    bits: list[int]
    objective: int
    expr: list[int]

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.instance.n:
            raise IndexError(f"variable index {i} out of range for n={self.instance.n}")

    def flip_delta(self, i: int) -> int:
        """Exact objective change of flipping bit i, in O(1)."""
        self._check_index(i)
        return (1 - 2 * self.bits[i]) * self.expr[i]

    def apply_flip(self, i: int) -> None:
        """Toggle bit i, adjusting objective and neighbor expr values.

        Cost is proportional to the degree of i; expr[i] itself is unchanged
        because expr_i never involves x_i.
        """
        self._check_index(i)
        old = self.bits[i]
        self.objective += (1 - 2 * old) * self.expr[i]
        sign = 1 - 2 * old  # +1 when turning on, -1 when turning off
        for j, q in self.instance.adjacency[i]:
            self.expr[j] += sign * q
        self.bits[i] = 1 - old

    def solution(self) -> Solution:
        return Solution(bits=tuple(self.bits), objective=self.objective)


def build_gain_state(instance: QuboInstance, bits: Sequence[int]) -> GainState:
    """Compute a GainState from scratch for the given assignment."""
    if isinstance(bits, Solution):
        bits = bits.bits
    _validated_bits(instance, bits)
    bit_list = [int(b) for b in bits]
    expr = list(instance.linear)
    for (i, j), q in instance.pairs.items():
        if bit_list[j]:
            expr[i] += q
        if bit_list[i]:
            expr[j] += q
    return GainState(
        instance=instance,
        bits=bit_list,
        objective=objective_value(instance, bit_list),
        expr=expr,
    )


def is_one_flip_local_optimum(
    instance: QuboInstance, bits: Sequence[int], strict: bool = False
) -> bool:
    """True iff no one-flip neighbor has a larger objective.

    Non-strict by default: ties (expr_i = 0) are allowed. In strict mode a
    flip must lose at least 1, i.e. ``(2*bits[i] - 1) * expr[i] >= 1``.
    """
    if isinstance(bits, Solution):
        bits = bits.bits
    _validated_bits(instance, bits)
    expr = list(instance.linear)
    for (i, j), q in instance.pairs.items():
        if bits[j]:
            expr[i] += q
        if bits[i]:
            expr[j] += q
    threshold = 1 if strict else 0
    for i, b in enumerate(bits):
        if (2 * b - 1) * expr[i] < threshold:
            return False
    return True


class LocalOptimaSet:
    """Ordered collection of distinct solutions with their objectives."""

    def __init__(self, solutions: Iterable[Solution] = ()):
        self._solutions: list[Solution] = []
        self._seen: set[tuple[int, ...]] = set()
        for sol in solutions:
            self.add(sol)

    def add(self, solution: Solution) -> bool:
        """Append a solution; returns False (and skips) on a duplicate."""
        if solution.bits in self._seen:
            return False
        self._seen.add(solution.bits)
        self._solutions.append(solution)
        return True

    def __len__(self) -> int:
        return len(self._solutions)

    def __iter__(self) -> Iterator[Solution]:
        return iter(self._solutions)

    def __getitem__(self, index: int) -> Solution:
        return self._solutions[index]

    def __contains__(self, bits) -> bool:
        return tuple(bits) in self._seen

    @property
    def solutions(self) -> list[Solution]:
        return list(self._solutions)

    def objectives(self) -> list[int]:
        return [sol.objective for sol in self._solutions]

    def sorted_by_objective(self) -> "LocalOptimaSet":
        """Canonical order: descending objective, then lexicographic bits."""
        ordered = sorted(self._solutions, key=lambda s: (-s.objective, s.bits))
        return LocalOptimaSet(ordered)

    def truncated(self, k: int) -> "LocalOptimaSet":
        if k < 1:
            raise ValueError("truncation size must be >= 1")
        return LocalOptimaSet(self._solutions[:k])

    def bits_matrix(self) -> np.ndarray:
        """Solutions stacked as a (count, n) int64 matrix."""
        if not self._solutions:
            return np.zeros((0, 0), dtype=np.int64)
        return np.array([sol.bits for sol in self._solutions], dtype=np.int64)

    def mean_objective(self) -> Fraction:
        if not self._solutions:
            raise ValueError("mean objective of an empty set is undefined")
        return Fraction(sum(sol.objective for sol in self._solutions), len(self._solutions))

    def mean_pairwise_distance(self) -> Fraction:
        """Mean Hamming distance over unordered distinct pairs."""
        k = len(self._solutions)
        if k < 2:
            raise ValueError("mean pairwise distance needs at least two solutions")
        bits = self.bits_matrix()
        ones = bits.sum(axis=1)
        gram = bits @ bits.T
        dist = ones[:, None] + ones[None, :] - 2 * gram
        total = int(dist.sum()) // 2
        return Fraction(total, k * (k - 1) // 2)
