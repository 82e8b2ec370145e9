"""Sparse-text instance files, random instance generation, and solution records.

The instance format is the ORLIB bqp layout: a count of instances, then per
instance a ``n m`` header followed by m whitespace-separated 1-based triplets
``i j value``. A diagonal triplet (i, i, v) adds v to the linear coefficient;
an off-diagonal triplet is read as a symmetric-matrix entry and therefore
contributes 2*v to the canonical combined pair coefficient.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import LocalOptimaSet, QuboInstance, Solution, objective_value


class ParseError(ValueError):
    """Malformed input text; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class _Tokens:
    """Whitespace-separated token stream that remembers line numbers."""

    def __init__(self, text: str):
        self.items: list[tuple[int, str]] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            for token in line.split():
                self.items.append((lineno, token))
        self.pos = 0
        self.last_line = max((lineno for lineno, _ in self.items), default=1)

    def next_int(self, what: str) -> tuple[int, int]:
        if self.pos >= len(self.items):
            raise ParseError(f"unexpected end of input while reading {what}", self.last_line)
        lineno, token = self.items[self.pos]
        self.pos += 1
        try:
            return int(token), lineno
        except ValueError:
            raise ParseError(f"expected integer for {what}, got {token!r}", lineno) from None

    def exhausted(self) -> bool:
        return self.pos >= len(self.items)

    def current_line(self) -> int:
        if self.pos < len(self.items):
            return self.items[self.pos][0]
        return self.last_line


def parse_instances(text: str, negate: bool = False) -> list[QuboInstance]:
    """Parse every instance in the file; ``negate`` flips all coefficients."""
    tokens = _Tokens(text)
    count, line = tokens.next_int("instance count")
    if count < 0:
        raise ParseError(f"instance count must be non-negative, got {count}", line)
    instances: list[QuboInstance] = []
    for _ in range(count):
        n, line = tokens.next_int("variable count")
        if n < 1:
            raise ParseError(f"variable count must be positive, got {n}", line)
        m, line = tokens.next_int("nonzero count")
        if m < 0:
            raise ParseError(f"nonzero count must be non-negative, got {m}", line)
        linear = [0] * n
        pairs: dict[tuple[int, int], int] = {}
        for _ in range(m):
            i, line = tokens.next_int("row index")
            j, _ = tokens.next_int("column index")
            v, _ = tokens.next_int("coefficient")
            if not (1 <= i <= n) or not (1 <= j <= n):
                raise ParseError(f"index ({i}, {j}) out of range for n={n}", line)
            if negate:
                v = -v
            if i == j:
                linear[i - 1] += v
            else:
                key = (i - 1, j - 1) if i < j else (j - 1, i - 1)
                pairs[key] = pairs.get(key, 0) + 2 * v
        pairs = {k: v for k, v in pairs.items() if v != 0}
        instances.append(QuboInstance(n=n, linear=linear, pairs=pairs))
    if not tokens.exhausted():
        raise ParseError(
            "trailing data after the declared instances (triplet count mismatch?)",
            tokens.current_line(),
        )
    return instances


def write_instance(instance: QuboInstance) -> str:
    """Serialize one instance; ``parse_instances`` inverts it exactly.

    Off-diagonal canonical coefficients are emitted halved (the file stores
    symmetric-matrix values), so odd combined coefficients are not
    representable and raise.
    """
    if instance.n == 0:
        raise ValueError("cannot serialize an empty (n=0) instance")
    entries: list[tuple[int, int, int]] = []
    for i, v in enumerate(instance.linear):
        if v != 0:
            entries.append((i + 1, i + 1, v))
    for (i, j) in sorted(instance.pairs):
        v = instance.pairs[(i, j)]
        if v % 2 != 0:
            raise ValueError(
                f"pair ({i}, {j}) has odd combined coefficient {v}; "
                "not representable as a symmetric-matrix entry"
            )
        entries.append((i + 1, j + 1, v // 2))
    lines = ["1", f"{instance.n} {len(entries)}"]
    lines.extend(f"{i} {j} {v}" for i, j, v in entries)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GeneratorConfig:
    """Random benchmark-like instance recipe; fully determined by the seed.

    ``m`` counts distinct off-diagonal entries; values are drawn uniformly
    from the nonzero integers in [lo, hi] as symmetric-matrix entries (the
    canonical combined coefficient is twice the draw). Each diagonal entry
    is present with probability ``diagonal_density``.
    """

    n: int
    m: int
    lo: int = -100
    hi: int = 100
    diagonal_density: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m < 0 or self.m > self.n * (self.n - 1) // 2:
            raise ValueError(f"m={self.m} infeasible for n={self.n}")
        if self.lo > self.hi:
            raise ValueError("empty coefficient range")
        if self.lo == 0 and self.hi == 0:
            raise ValueError("coefficient range contains no nonzero value")
        if not 0.0 <= self.diagonal_density <= 1.0:
            raise ValueError("diagonal density must be in [0, 1]")


def _nonzero_draw(rng: random.Random, lo: int, hi: int) -> int:
    while True:
        v = rng.randint(lo, hi)
        if v != 0:
            return v


def generate_instance(config: GeneratorConfig) -> QuboInstance:
    """Deterministic random instance for the given config."""
    rng = random.Random(config.seed)
    n = config.n
    total = n * (n - 1) // 2
    keys: set[tuple[int, int]] = set()
    if config.m > total // 2:
        all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        keys.update(rng.sample(all_pairs, config.m))
    else:
        while len(keys) < config.m:
            i = rng.randrange(n)
            j = rng.randrange(n)
            if i != j:
                keys.add((i, j) if i < j else (j, i))
    pairs = {key: 2 * _nonzero_draw(rng, config.lo, config.hi) for key in sorted(keys)}
    linear = [0] * n
    for i in range(n):
        if rng.random() < config.diagonal_density:
            linear[i] = _nonzero_draw(rng, config.lo, config.hi)
    name = f"gen-n{n}-m{config.m}-s{config.seed}"
    return QuboInstance(n=n, linear=linear, pairs=pairs, name=name)


def write_solutions(optima: LocalOptimaSet) -> str:
    """One ``<bitstring> <objective>`` record per line, order preserved."""
    lines = [f"{''.join(str(b) for b in sol.bits)} {sol.objective}" for sol in optima]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_solutions(text: str, instance: QuboInstance | None = None) -> LocalOptimaSet:
    """Read solution records; verifies objectives when an instance is given."""
    result = LocalOptimaSet()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected '<bits> <objective>', got {line!r}", lineno)
        bit_str, obj_str = fields
        if any(c not in "01" for c in bit_str):
            raise ParseError(f"bit string contains non-binary character: {bit_str!r}", lineno)
        try:
            objective = int(obj_str)
        except ValueError:
            raise ParseError(f"expected integer objective, got {obj_str!r}", lineno) from None
        bits = tuple(int(c) for c in bit_str)
        if instance is not None:
            if len(bits) != instance.n:
                raise ParseError(
                    f"bit string length {len(bits)} does not match n={instance.n}", lineno
                )
            actual = objective_value(instance, bits)
            if actual != objective:
                raise ParseError(
                    f"objective mismatch: record says {objective}, evaluates to {actual}",
                    lineno,
                )
        elif result.solutions and len(bits) != len(result.solutions[0].bits):
            raise ParseError("inconsistent bit string lengths", lineno)
        if not result.add(Solution(bits=bits, objective=objective)):
            raise ParseError(f"duplicate solution {bit_str}", lineno)
    return result
