"""Brute-force ground truth over all 2^n assignments (small n only)."""

from __future__ import annotations

import numpy as np

from .model import LocalOptimaSet, QuboInstance, Solution

MAX_ORACLE_VARS = 24


class CapExceededError(ValueError):
    """Instance too large for exhaustive enumeration."""


def _check_cap(instance: QuboInstance) -> None:
    if instance.n > MAX_ORACLE_VARS:
        raise CapExceededError(
            f"brute force capped at n <= {MAX_ORACLE_VARS}, got n = {instance.n}"
        )


def _all_objectives(instance: QuboInstance) -> np.ndarray:
    """Objective of every assignment; bit i of the array index holds x_i.

    Built by doubling: appending variable i to all 2^i prefixes adds
    q_i + sum_{j<i} q_ij * x_j, which is vectorized over the prefix codes.
    Coefficients are small ints, so int64 is exact.
    """
    obj = np.zeros(1, dtype=np.int64)
    for i in range(instance.n):
        contrib = np.full(1 << i, instance.linear[i], dtype=np.int64)
        if instance.adjacency[i]:
            prefix = np.arange(1 << i, dtype=np.int64)
            for j, q in instance.adjacency[i]:
                if j < i:
                    contrib += q * ((prefix >> j) & 1)
        obj = np.concatenate([obj, obj + contrib])
    return obj


def _bits_of(code: int, n: int) -> tuple[int, ...]:
    return tuple((code >> i) & 1 for i in range(n))


def brute_force_local_optima(instance: QuboInstance, strict: bool = False) -> LocalOptimaSet:
    """Every one-flip local optimum, sorted by descending objective then bits."""
    _check_cap(instance)
    n = instance.n
    obj = _all_objectives(instance)
    if n == 0:
        return LocalOptimaSet([Solution(bits=(), objective=0)])
    tensor = obj.reshape((2,) * n)  # axis a corresponds to bit n-1-a
    mask = np.ones_like(tensor, dtype=bool)
    for i in range(n):
        neighbor = np.flip(tensor, axis=n - 1 - i)
        mask &= (tensor > neighbor) if strict else (tensor >= neighbor)
    codes = np.flatnonzero(mask.reshape(-1))
    found = [Solution(bits=_bits_of(int(c), n), objective=int(obj[c])) for c in codes]
    found.sort(key=lambda s: (-s.objective, s.bits))
    return LocalOptimaSet(found)


def brute_force_global_optimum(instance: QuboInstance) -> Solution:
    """Maximum-objective assignment; ties broken by lexicographically smallest bits."""
    _check_cap(instance)
    n = instance.n
    obj = _all_objectives(instance)
    best = int(obj.max())
    candidates = np.flatnonzero(obj == best)
    # Lexicographic order on the bit vector = numeric order of the bit-reversed code.
    reversed_codes = np.zeros_like(candidates)
    for j in range(n):
        reversed_codes = (reversed_codes << 1) | ((candidates >> j) & 1)
    winner = int(candidates[int(np.argmin(reversed_codes))]) if n else 0
    return Solution(bits=_bits_of(winner, n), objective=best)
