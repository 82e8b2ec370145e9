"""Scikit-learn style front end.

These estimators let the toolkit compose with the wider ecosystem
(``get_params``/``set_params``, ``clone``, pipelines on the transformer):
dense integer Q matrices go in, numpy arrays come out. The heavy lifting
lives in the functional modules; these classes only validate and adapt.
"""

from __future__ import annotations

import random

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .analysis import FrequencyProfile, TransformConfig, frequency, transform
from .budget import Budget
from .enumeration import EnumerationConfig, enumerate_local_optima
from .model import LocalOptimaSet, QuboInstance, Solution, objective_value
from .tabu import EliteSet, TabuParams, greedy_descent, sample_greedy_restarts, tabu_search


def check_q_matrix(X) -> QuboInstance:
    """Validate a square integer coefficient matrix (or pass an instance through)."""
    if isinstance(X, QuboInstance):
        return X
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square coefficient matrix, got shape {arr.shape}")
    return QuboInstance.from_dense(arr)


def check_solution_matrix(X) -> np.ndarray:
    """Validate a (n_solutions, n_variables) binary matrix."""
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2d solutions matrix, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("solution matrix must be binary")
    return arr.astype(np.int64)


def _expose(optima: LocalOptimaSet, estimator) -> None:
    estimator.optima_set_ = optima
    estimator.optima_ = optima.bits_matrix()
    estimator.objectives_ = np.array(optima.objectives(), dtype=np.int64)


class LocalOptimaEnumerator(BaseEstimator):
    """Enumerate one-flip local optima of a Q matrix by propagation search.

    After ``fit(Q)``, ``optima_`` holds the solutions as a (k, n) binary
    matrix and ``objectives_`` their objective values, best first.
    """

    def __init__(
        self,
        top_k: int = 500,
        max_nodes: int | None = None,
        max_seconds: float | None = None,
        strict: bool = False,
        random_state: int = 0,
    ):
        self.top_k = top_k
        self.max_nodes = max_nodes
        self.max_seconds = max_seconds
        self.strict = strict
        self.random_state = random_state

    def fit(self, X, y=None):
        instance = check_q_matrix(X)
        config = EnumerationConfig(
            top_k=self.top_k,
            max_nodes=self.max_nodes,
            max_seconds=self.max_seconds,
            strict=self.strict,
            seed=self.random_state,
        )
        _expose(enumerate_local_optima(instance, config), self)
        self.n_features_in_ = instance.n
        return self


class GreedyRestartSampler(BaseEstimator):
    """Sample local optima by greedy descent from random starts."""

    def __init__(
        self,
        top_k: int = 500,
        max_flips: int | None = 10000,
        max_seconds: float | None = None,
        random_state: int = 0,
    ):
        self.top_k = top_k
        self.max_flips = max_flips
        self.max_seconds = max_seconds
        self.random_state = random_state

    def fit(self, X, y=None):
        instance = check_q_matrix(X)
        budget = Budget(max_units=self.max_flips, max_seconds=self.max_seconds)
        optima = sample_greedy_restarts(instance, budget, self.top_k, self.random_state)
        _expose(optima, self)
        self.n_features_in_ = instance.n
        return self


class SoftConstraintReweighter(BaseEstimator, TransformerMixin):
    """Learn per-variable value frequencies from solutions, then reweight Q.

    ``fit`` takes a (n_solutions, n_variables) binary matrix (e.g. the
    ``optima_`` of an enumerator). ``transform`` takes the (n, n) Q matrix
    and returns the stacked (2, n, n) array [Q1, Q2]: Q1 rewards the
    frequent values, Q2 penalizes them.
    """

    def __init__(self, alpha=0.95, delta: int = 2, delta_mode: str = "percent"):
        self.alpha = alpha
        self.delta = delta
        self.delta_mode = delta_mode

    def fit(self, X, y=None):
        bits = check_solution_matrix(X)
        if bits.shape[0] == 0:
            raise ValueError("need at least one solution to profile")
        solutions = LocalOptimaSet(
            Solution(bits=tuple(int(b) for b in row), objective=0) for row in bits
        )
        if len(solutions) != bits.shape[0]:
            raise ValueError("solution matrix contains duplicate rows")
        self.profile_ = frequency(solutions)
        self.freq1_ = np.array([float(f) for f in self.profile_.freq1])
        self.freq0_ = np.array([float(f) for f in self.profile_.freq0])
        self.n_features_in_ = bits.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "profile_"):
            raise NotFittedError("fit the reweighter on a solution matrix first")
        instance = check_q_matrix(X)
        q1, q2 = self.transform_instances(instance)
        return np.stack([q1.to_dense(), q2.to_dense()])

    def transform_instances(self, instance: QuboInstance) -> tuple[QuboInstance, QuboInstance]:
        if not hasattr(self, "profile_"):
            raise NotFittedError("fit the reweighter on a solution matrix first")
        config = TransformConfig(alpha=self.alpha, delta=self.delta, delta_mode=self.delta_mode)
        return transform(instance, self.profile_, config)


class TabuSearchOptimizer(BaseEstimator):
    """One-flip tabu search; ``fit(Q)`` exposes the best solution found."""

    def __init__(
        self,
        max_iters: int | None = 2000,
        max_seconds: float | None = None,
        elite_size: int = 10,
        tenure_base: int = 10,
        tenure_span: int | None = None,
        backtrack_depth: int = 20,
        aspiration: bool = True,
        random_state: int = 0,
    ):
        self.max_iters = max_iters
        self.max_seconds = max_seconds
        self.elite_size = elite_size
        self.tenure_base = tenure_base
        self.tenure_span = tenure_span
        self.backtrack_depth = backtrack_depth
        self.aspiration = aspiration
        self.random_state = random_state

    def fit(self, X, y=None, elite=None):
        """Run the search; ``elite`` optionally seeds starting solutions.

        ``elite`` may be an EliteSet or a binary matrix of starting
        solutions. Without one, a random start is improved by greedy
        descent to seed a singleton elite set.
        """
        instance = check_q_matrix(X)
        if elite is None:
            rng = random.Random(self.random_state)
            bits = tuple(rng.randrange(2) for _ in range(instance.n))
            start = Solution(bits=bits, objective=objective_value(instance, bits))
            elite_set = EliteSet(capacity=self.elite_size)
            elite_set.add(greedy_descent(instance, start))
        elif isinstance(elite, EliteSet):
            elite_set = elite
        else:
            rows = check_solution_matrix(elite)
            elite_set = EliteSet(capacity=max(self.elite_size, rows.shape[0]))
            for row in rows:
                bits = tuple(int(b) for b in row)
                elite_set.add(Solution(bits=bits, objective=objective_value(instance, bits)))
        params = TabuParams(
            tenure_base=self.tenure_base,
            tenure_span=self.tenure_span,
            backtrack_depth=self.backtrack_depth,
            aspiration=self.aspiration,
            seed=self.random_state,
        )
        budget = Budget(max_units=self.max_iters, max_seconds=self.max_seconds)
        result = tabu_search(instance, elite_set, budget, params)
        self.best_bits_ = np.array(result.best.bits, dtype=np.int64)
        self.best_objective_ = result.best.objective
        self.checkpoints_ = result.checkpoints
        self.n_features_in_ = instance.n
        return self
