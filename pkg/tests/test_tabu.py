import random
from fractions import Fraction

import pytest

from quboflip import (
    Budget,
    EliteSet,
    GeneratorConfig,
    Solution,
    TabuParams,
    brute_force_global_optimum,
    build_gain_state,
    generate_instance,
    greedy_descent,
    is_one_flip_local_optimum,
    objective_value,
    path_relink,
    run_variant,
    sample_greedy_restarts,
    tabu_search,
)
from quboflip.analysis import FrequencyProfile, TransformConfig, transform


def _solution(instance, bits):
    return Solution(bits=tuple(bits), objective=objective_value(instance, bits))


class TestEliteSet:
    def test_orders_and_caps(self):
        elite = EliteSet(capacity=2)
        assert elite.add(Solution((0, 0), 1))
        assert elite.add(Solution((0, 1), 5))
        assert elite.add(Solution((1, 0), 3))
        assert [s.objective for s in elite] == [5, 3]

    def test_rejects_duplicates_and_worse(self):
        elite = EliteSet(capacity=2)
        elite.add(Solution((0, 1), 5))
        assert not elite.add(Solution((0, 1), 5))
        elite.add(Solution((1, 0), 3))
        assert not elite.add(Solution((1, 1), 2))
        assert len(elite) == 2


class TestGreedyDescent:
    def test_worked_example(self, example3):
        result = greedy_descent(example3, _solution(example3, [0, 0, 0]))
        assert result.bits == (0, 0, 1)
        assert result.objective == 9

    def test_already_optimal_unchanged(self, example3):
        start = _solution(example3, [0, 0, 1])
        assert greedy_descent(example3, start) == start

    def test_zero_instance_unchanged(self, zero3):
        start = _solution(zero3, [1, 0, 1])
        assert greedy_descent(zero3, start) == start

    def test_result_is_always_locally_optimal(self):
        inst = generate_instance(GeneratorConfig(n=50, m=200, seed=21))
        rng = random.Random(0)
        for _ in range(20):
            start = _solution(inst, [rng.randrange(2) for _ in range(50)])
            result = greedy_descent(inst, start)
            assert is_one_flip_local_optimum(inst, result.bits)
            assert result.objective >= start.objective
            assert result.objective == objective_value(inst, result.bits)


class TestSampleGreedyRestarts:
    def test_finds_example_optimum(self, example3):
        found = sample_greedy_restarts(example3, Budget(max_units=300), 10, seed=0)
        assert (0, 0, 1) in found

    def test_all_members_locally_optimal(self):
        inst = generate_instance(GeneratorConfig(n=40, m=150, seed=30))
        found = sample_greedy_restarts(inst, Budget(max_units=3000), 50, seed=1)
        assert len(found) >= 1
        for sol in found:
            assert is_one_flip_local_optimum(inst, sol.bits)

    def test_deterministic(self):
        inst = generate_instance(GeneratorConfig(n=40, m=150, seed=30))
        a = sample_greedy_restarts(inst, Budget(max_units=2000), 20, seed=4)
        b = sample_greedy_restarts(inst, Budget(max_units=2000), 20, seed=4)
        assert a.solutions == b.solutions

    def test_canonical_order_and_cap(self):
        inst = generate_instance(GeneratorConfig(n=30, m=100, seed=31))
        found = sample_greedy_restarts(inst, Budget(max_units=4000), 5, seed=2)
        assert len(found) <= 5
        keys = [(-s.objective, s.bits) for s in found]
        assert keys == sorted(keys)


class TestPathRelink:
    def test_equal_endpoints(self, example3):
        a = _solution(example3, [0, 1, 0])
        assert path_relink(example3, a, a) == a

    def test_single_difference_bit(self, example3):
        a = _solution(example3, [0, 0, 0])
        b = _solution(example3, [0, 0, 1])
        assert path_relink(example3, a, b) == b

    def test_full_walk_keeps_best_on_path(self, example3):
        a = _solution(example3, [0, 0, 0])
        b = _solution(example3, [1, 1, 1])
        best = path_relink(example3, a, b)
        # First step flips the +9 bit; best-on-path is [0,0,1] with 9.
        assert best.bits == (0, 0, 1)
        assert best.objective == 9

    def test_result_at_least_endpoints(self):
        inst = generate_instance(GeneratorConfig(n=30, m=120, seed=12))
        rng = random.Random(7)
        for _ in range(20):
            a = _solution(inst, [rng.randrange(2) for _ in range(30)])
            b = _solution(inst, [rng.randrange(2) for _ in range(30)])
            best = path_relink(inst, a, b)
            assert best.objective >= max(a.objective, b.objective)
            # Outside the difference set the result agrees with both ends.
            for i in range(30):
                if a.bits[i] == b.bits[i]:
                    assert best.bits[i] == a.bits[i]

    def test_length_mismatch(self, example3):
        with pytest.raises(ValueError):
            path_relink(example3, _solution(example3, [0, 0, 0]), Solution((0, 0), 0))


class TestTabuSearch:
    def test_worked_example_reaches_global(self, example3):
        elite = EliteSet()
        elite.add(_solution(example3, [0, 0, 0]))
        result = tabu_search(example3, elite, Budget(max_units=60), TabuParams(seed=1))
        assert result.best.bits == (0, 0, 1)
        assert result.best.objective == 9

    def test_empty_elite_rejected(self, example3):
        with pytest.raises(ValueError):
            tabu_search(example3, EliteSet(), Budget(max_units=10), TabuParams())

    def test_checkpoints_are_local_optima(self):
        inst = generate_instance(GeneratorConfig(n=40, m=160, seed=14))
        elite = EliteSet()
        elite.add(greedy_descent(inst, _solution(inst, [0] * 40)))
        result = tabu_search(inst, elite, Budget(max_units=800), TabuParams(seed=2))
        assert result.checkpoints
        for chk in result.checkpoints:
            assert is_one_flip_local_optimum(inst, chk.bits)
            assert chk.objective == objective_value(inst, chk.bits)

    def test_best_never_below_elite(self):
        inst = generate_instance(GeneratorConfig(n=40, m=160, seed=15))
        elite = EliteSet()
        for s in sample_greedy_restarts(inst, Budget(max_units=2000), 5, seed=3):
            elite.add(s)
        best_elite = max(s.objective for s in elite)
        result = tabu_search(inst, elite, Budget(max_units=200), TabuParams(seed=3))
        assert result.best.objective >= best_elite
        assert result.best.objective == objective_value(inst, result.best.bits)

    def test_deterministic(self):
        inst = generate_instance(GeneratorConfig(n=40, m=160, seed=16))
        elite = EliteSet()
        elite.add(greedy_descent(inst, _solution(inst, [1] * 40)))
        a = tabu_search(inst, elite, Budget(max_units=500), TabuParams(seed=9))
        b = tabu_search(inst, elite, Budget(max_units=500), TabuParams(seed=9))
        assert a.best == b.best
        assert a.checkpoints == b.checkpoints

    def test_finds_global_on_small_instances(self):
        for seed in range(4):
            inst = generate_instance(GeneratorConfig(n=12, m=30, seed=seed + 60))
            elite = EliteSet()
            elite.add(greedy_descent(inst, _solution(inst, [0] * 12)))
            result = tabu_search(inst, elite, Budget(max_units=2000), TabuParams(seed=seed))
            assert result.best.objective == brute_force_global_optimum(inst).objective

    def test_params_validation(self):
        with pytest.raises(ValueError):
            TabuParams(backtrack_depth=0)
        with pytest.raises(ValueError):
            TabuParams(tenure_base=-1)


class TestRunVariant:
    def test_same_instance_matches_tabu_search(self, example3):
        elite = EliteSet()
        elite.add(_solution(example3, [0, 0, 0]))
        budget = Budget(max_units=60)
        plain = tabu_search(example3, elite, budget, TabuParams(seed=5))
        variant = run_variant(example3, example3, elite, budget, TabuParams(seed=5))
        assert plain.best == variant.best

    def test_identity_transform_matches(self):
        inst = generate_instance(GeneratorConfig(n=30, m=120, seed=18))
        half = Fraction(1, 2)
        half_profile = FrequencyProfile(
            freq0=(half,) * 30, freq1=(half,) * 30, sample_count=2
        )
        q1, q2 = transform(inst, half_profile, TransformConfig(alpha="0.95", delta=3))
        elite = EliteSet()
        elite.add(greedy_descent(inst, _solution(inst, [0] * 30)))
        budget = Budget(max_units=300)
        base = tabu_search(inst, elite, budget, TabuParams(seed=6))
        via_q1 = run_variant(inst, q1, elite, budget, TabuParams(seed=6))
        assert base.best == via_q1.best

    def test_reward_still_scored_on_base(self, example3):
        profile = FrequencyProfile(freq0=(1, 1, 0), freq1=(0, 0, 1), sample_count=1)
        q1, _ = transform(example3, profile, TransformConfig(alpha="0.95", delta=2))
        assert q1.linear == [-6, -10, 11]
        elite = EliteSet()
        elite.add(_solution(example3, [0, 0, 0]))
        result = run_variant(example3, q1, elite, Budget(max_units=80), TabuParams(seed=7))
        assert result.best.bits == (0, 0, 1)
        assert result.best.objective == 9  # base objective, not the inflated one

    def test_dimension_mismatch(self, example3):
        other = generate_instance(GeneratorConfig(n=4, m=2, seed=1))
        elite = EliteSet()
        elite.add(_solution(example3, [0, 0, 0]))
        with pytest.raises(ValueError):
            run_variant(example3, other, elite, Budget(max_units=10), TabuParams())
