import pytest

from quboflip import (
    EnumerationConfig,
    GeneratorConfig,
    QuboInstance,
    SearchState,
    brute_force_local_optima,
    build_gain_state,
    diversity_report,
    enumerate_local_optima,
    export_big_m_model,
    generate_instance,
    is_one_flip_local_optimum,
)
from quboflip.model import LocalOptimaSet, Solution


class TestSearchStateBounds:
    def test_initial_bounds(self, example3):
        state = SearchState(example3)
        assert state.expr_lo == [-16, -16, -11]
        assert state.expr_hi == [8, 4, 9]

    def test_forced_chain_completes_example(self, example3):
        state = SearchState(example3)
        assert state.propagate()
        state.assign(1, 0)
        state.assign(2, 1)
        assert state.propagate()
        # expr_hi of variable 0 is -4 + 0 - 12 = -16 < 0, forcing it to 0.
        assert state.assignment == [0, 0, 1]
        assert state.is_complete()

    def test_single_variable_forced_at_root(self):
        inst = QuboInstance(n=1, linear=[5], pairs={})
        state = SearchState(inst)
        assert state.propagate()
        assert state.assignment == [1]

    def test_opposite_chain_matches_oracle_membership(self, example3):
        state = SearchState(example3)
        assert state.propagate()
        state.assign(2, 0)
        state.assign(1, 1)
        consistent = state.propagate()
        optima = {s.bits for s in brute_force_local_optima(example3)}
        if consistent and state.is_complete():
            assert state.bits() in optima
        else:
            assert not any(bits[2] == 0 and bits[1] == 1 for bits in optima)

    def test_bounds_collapse_to_expr_on_full_assignment(self):
        inst = generate_instance(GeneratorConfig(n=15, m=40, seed=8))
        import random

        rng = random.Random(0)
        for _ in range(20):
            bits = [rng.randrange(2) for _ in range(15)]
            state = SearchState(inst)
            for i, b in enumerate(bits):
                if state.assignment[i] == -1:
                    state.assign(i, b)
                    if not state.propagate():
                        break
            else:
                if state.is_complete():
                    expr = build_gain_state(inst, state.assignment).expr
                    assert state.expr_lo == expr
                    assert state.expr_hi == expr

    def test_undo_restores_bounds(self, example3):
        state = SearchState(example3)
        state.propagate()
        mark = state.mark()
        lo, hi = list(state.expr_lo), list(state.expr_hi)
        state.assign(0, 1)
        state.propagate()
        state.undo_to(mark)
        assert state.expr_lo == lo
        assert state.expr_hi == hi
        assert state.assignment == [-1, -1, -1]

    def test_big_m(self, example3):
        state = SearchState(example3)
        assert [state.big_m(i) for i in range(3)] == [29, 29, 30]


class TestEnumerateLocalOptima:
    def test_worked_example_exhaustive(self, example3):
        found = enumerate_local_optima(example3, EnumerationConfig(seed=0))
        assert [(s.bits, s.objective) for s in found] == [((0, 0, 1), 9), ((1, 1, 0), 0)]

    def test_all_zero(self, zero3):
        found = enumerate_local_optima(zero3, EnumerationConfig(top_k=100, seed=0))
        assert len(found) == 8

    def test_strict_all_zero_empty(self, zero3):
        found = enumerate_local_optima(zero3, EnumerationConfig(strict=True, seed=0))
        assert len(found) == 0

    @pytest.mark.parametrize("branching", ["hint-descent", "max-commitment"])
    def test_oracle_equivalence(self, branching):
        for seed in range(6):
            n = 8 + 2 * (seed % 3)
            m = (n * (n - 1) // 2) // 2
            inst = generate_instance(GeneratorConfig(n=n, m=m, seed=seed + 40))
            oracle = {(s.bits, s.objective) for s in brute_force_local_optima(inst)}
            config = EnumerationConfig(top_k=1 << 20, seed=seed, branching=branching)
            found = {(s.bits, s.objective) for s in enumerate_local_optima(inst, config)}
            assert found == oracle

    def test_strict_oracle_equivalence(self):
        for seed in range(4):
            inst = generate_instance(
                GeneratorConfig(n=10, m=20, lo=-10, hi=10, diagonal_density=0.6, seed=seed)
            )
            oracle = {s.bits for s in brute_force_local_optima(inst, strict=True)}
            config = EnumerationConfig(top_k=1 << 20, seed=seed, strict=True)
            assert {s.bits for s in enumerate_local_optima(inst, config)} == oracle

    def test_soundness_under_budget(self):
        inst = generate_instance(GeneratorConfig(n=60, m=300, seed=77))
        found = enumerate_local_optima(inst, EnumerationConfig(max_nodes=3000, seed=3))
        for sol in found:
            assert is_one_flip_local_optimum(inst, sol.bits)

    def test_no_duplicates(self):
        inst = generate_instance(GeneratorConfig(n=12, m=30, seed=2))
        found = enumerate_local_optima(inst, EnumerationConfig(top_k=1 << 20, seed=2))
        bits = [s.bits for s in found]
        assert len(bits) == len(set(bits))

    def test_deterministic_for_seed_and_node_budget(self):
        inst = generate_instance(GeneratorConfig(n=40, m=150, seed=5))
        config = EnumerationConfig(max_nodes=2000, seed=11)
        a = enumerate_local_optima(inst, config)
        b = enumerate_local_optima(inst, config)
        assert [(s.bits, s.objective) for s in a] == [(s.bits, s.objective) for s in b]

    def test_seed_changes_budgeted_output(self):
        inst = generate_instance(GeneratorConfig(n=60, m=300, seed=6))
        a = enumerate_local_optima(inst, EnumerationConfig(max_nodes=4000, seed=1))
        b = enumerate_local_optima(inst, EnumerationConfig(max_nodes=4000, seed=2))
        assert [s.bits for s in a] != [s.bits for s in b]

    def test_top_k_truncation_and_order(self, zero3):
        found = enumerate_local_optima(zero3, EnumerationConfig(top_k=3, seed=0))
        assert len(found) == 3
        keys = [(-s.objective, s.bits) for s in found]
        assert keys == sorted(keys)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EnumerationConfig(top_k=0)
        with pytest.raises(ValueError):
            EnumerationConfig(max_nodes=0)
        with pytest.raises(ValueError):
            EnumerationConfig(max_seconds=-1.0)
        with pytest.raises(ValueError):
            EnumerationConfig(branching="dfs")
        with pytest.raises(ValueError):
            EnumerationConfig(value_bias=1.5)
        with pytest.raises(ValueError):
            EnumerationConfig(hint_harvest=0)


class TestDiversityReport:
    def test_hand_values(self):
        pair = LocalOptimaSet([Solution((0, 0, 0), 1), Solution((1, 1, 1), 3)])
        mu_d, mu_obj = diversity_report(pair)
        assert mu_d == 3
        assert mu_obj == 2

    def test_undersized(self):
        with pytest.raises(ValueError):
            diversity_report(LocalOptimaSet([Solution((0,), 0)]))


class TestBigMModel:
    def test_example_text(self, example3):
        text = export_big_m_model(example3)
        assert "up_0: 12 x1 - 12 x2 - 29 x0 <= 4" in text
        assert "dn_0: 12 x1 - 12 x2 - 29 x0 >= -25" in text
        assert "Binary" in text and "x0 x1 x2" in text

    def test_feasible_points_are_exactly_local_optima(self):
        # Independent evaluation of the two big-M inequalities per row.
        for seed in (1, 2, 3):
            inst = generate_instance(GeneratorConfig(n=9, m=14, seed=seed))
            state = SearchState(inst)
            big_m = [state.big_m(i) for i in range(inst.n)]
            for code in range(1 << inst.n):
                bits = [(code >> i) & 1 for i in range(inst.n)]
                expr = build_gain_state(inst, bits).expr
                feasible = all(
                    expr[i] <= big_m[i] * bits[i] and expr[i] >= -big_m[i] * (1 - bits[i])
                    for i in range(inst.n)
                )
                assert feasible == is_one_flip_local_optimum(inst, bits)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            export_big_m_model(QuboInstance(n=0, linear=[], pairs={}))
