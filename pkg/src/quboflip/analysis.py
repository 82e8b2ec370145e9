"""Frequency profiling of local-optima sets, soft-constraint Q transforms,
and the experiment statistics (improvement percentages, paired t-test)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import LocalOptimaSet, QuboInstance

# Two-sided 5% critical values of Student's t; normal approximation past df 30.
T_CRITICAL_05 = {
    1: 12.706, 2: 4.303, 3: 3.182, 4: 2.776, 5: 2.571,
    6: 2.447, 7: 2.365, 8: 2.306, 9: 2.262, 10: 2.228,
    11: 2.201, 12: 2.179, 13: 2.160, 14: 2.145, 15: 2.131,
    16: 2.120, 17: 2.110, 18: 2.101, 19: 2.093, 20: 2.086,
    21: 2.080, 22: 2.074, 23: 2.069, 24: 2.064, 25: 2.060,
    26: 2.056, 27: 2.052, 28: 2.048, 29: 2.045, 30: 2.042,
}


def t_critical_value(df: int) -> float:
    """Two-sided 0.05 critical value for the given degrees of freedom."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return T_CRITICAL_05.get(df, 1.960)


def as_fraction(value) -> Fraction:
    """Exact rational view of a threshold or percentage.

    Floats go through their shortest decimal repr, so 0.95 means 19/20
    rather than the nearest binary double; this keeps threshold comparisons
    like freq >= 0.95 exact for sets of e.g. 500 solutions.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class FrequencyProfile:
    """Per-variable relative frequencies of 0/1 across a solution set."""

    freq0: tuple[Fraction, ...]
    freq1: tuple[Fraction, ...]
    sample_count: int

    @property
    def n(self) -> int:
        return len(self.freq1)


def frequency(optima: LocalOptimaSet) -> FrequencyProfile:
    """Relative frequency of each variable being 0/1 in the set (exact)."""
    k = len(optima)
    if k == 0:
        raise ValueError("frequency profile of an empty set is undefined")
    counts = optima.bits_matrix().sum(axis=0)
    freq1 = tuple(Fraction(int(c), k) for c in counts)
    freq0 = tuple(1 - f for f in freq1)
    return FrequencyProfile(freq0=freq0, freq1=freq1, sample_count=k)


@dataclass(frozen=True)
class TransformConfig:
    """Threshold alpha plus the adjustment magnitude delta.

    In "absolute" mode delta is used as-is; in "percent" mode it is a
    percentage of the largest |coefficient| of the canonical matrix,
    rounded half-up to an integer.
    """

    alpha: Fraction
    delta: int
    delta_mode: str = "absolute"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.delta_mode not in ("absolute", "percent"):
            raise ValueError(f"unknown delta mode {self.delta_mode!r}")

    def resolve_delta(self, instance: QuboInstance) -> int:
        if self.delta_mode == "absolute":
            return self.delta
        scaled = Fraction(self.delta, 100) * instance.max_abs_coefficient()
        resolved = math.floor(scaled + Fraction(1, 2))
        if resolved == 0:
            raise ValueError(
                f"delta of {self.delta}% of max |coefficient| "
                f"{instance.max_abs_coefficient()} rounds to zero"
            )
        return resolved


def transform(
    instance: QuboInstance, profile: FrequencyProfile, config: TransformConfig
) -> tuple[QuboInstance, QuboInstance]:
    """Reward/penalty copies (Q1, Q2) of the instance.

    Q1 favors the observed local optima: variables stuck at 1 (freq1 >= alpha)
    get +delta on their linear coefficient, variables stuck at 0 get -delta.
    Q2 applies the exact opposite adjustments to escape those optima. Pair
    coefficients are untouched. A variable crossing both thresholds (only
    possible for alpha <= 1/2) receives both adjustments, which cancel.
    """
    if profile.n != instance.n:
        raise ValueError(
            f"profile covers {profile.n} variables, instance has {instance.n}"
        )
    delta = config.resolve_delta(instance)
    linear1 = list(instance.linear)
    linear2 = list(instance.linear)
    for i in range(instance.n):
        if profile.freq0[i] >= config.alpha:
            linear1[i] -= delta
            linear2[i] += delta
        if profile.freq1[i] >= config.alpha:
            linear1[i] += delta
            linear2[i] -= delta
    q1 = QuboInstance(n=instance.n, linear=linear1, pairs=dict(instance.pairs), name=instance.name)
    q2 = QuboInstance(n=instance.n, linear=linear2, pairs=dict(instance.pairs), name=instance.name)
    return q1, q2


def improvement_pct(baseline: int, candidate: int) -> Fraction:
    """Signed percentage improvement of candidate over baseline (exact)."""
    if baseline == 0:
        raise ValueError("improvement percentage undefined for zero baseline")
    return Fraction(100 * (candidate - baseline), abs(baseline))


def paired_t_test(a: Sequence, b: Sequence) -> tuple[float, int]:
    """Paired two-sample t statistic and degrees of freedom.

    t = mean(d) / (sd(d) / sqrt(k)) over the differences d = a - b with the
    sample (k-1) standard deviation. All-zero differences report t = 0;
    nonzero mean with zero variance is degenerate and raises.
    """
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    k = len(a)
    if k < 2:
        raise ValueError("paired t-test needs at least two pairs")
    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    mean = sum(diffs) / k
    var = sum((d - mean) ** 2 for d in diffs) / (k - 1)
    if var == 0.0:
        if mean == 0.0:
            return 0.0, k - 1
        raise ValueError("zero variance with nonzero mean difference")
    t = mean / math.sqrt(var / k)
    return t, k - 1
