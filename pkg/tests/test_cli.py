import json

import pytest

from quboflip.cli import main
from conftest import EXAMPLE_FILE


@pytest.fixture
def example_path(tmp_path):
    path = tmp_path / "example3.txt"
    path.write_text(EXAMPLE_FILE)
    return path


def run(*argv):
    return main([str(a) for a in argv])


class TestGenerate:
    def test_writes_parseable_instance(self, tmp_path):
        out = tmp_path / "gen.txt"
        assert run("generate", "--n", 12, "--m", 20, "--seed", 3, "--out", out) == 0
        assert run("enumerate", out, "--iters", 500, "--out", tmp_path / "sol.txt") == 0

    def test_infeasible_is_usage_error(self, tmp_path):
        assert run("generate", "--n", 3, "--m", 9, "--out", tmp_path / "x.txt") == 2


class TestEnumerateAndOracle:
    def test_example_exhaustive(self, example_path, tmp_path, capsys):
        out = tmp_path / "enum.txt"
        assert run("enumerate", example_path, "--out", out) == 0
        assert out.read_text() == "001 9\n110 0\n"
        report = capsys.readouterr().out
        assert "solutions=2" in report

    def test_oracle_matches_enumerate_byte_for_byte(self, tmp_path):
        inst = tmp_path / "inst.txt"
        run("generate", "--n", 12, "--m", 25, "--seed", 9, "--out", inst)
        enum_out = tmp_path / "enum.txt"
        oracle_out = tmp_path / "oracle.txt"
        assert run("enumerate", inst, "--out", enum_out, "--seed", 1) == 0
        assert run("oracle", inst, "--out", oracle_out) == 0
        assert enum_out.read_bytes() == oracle_out.read_bytes()

    def test_oracle_cap_exit_code(self, tmp_path):
        inst = tmp_path / "big.txt"
        run("generate", "--n", 30, "--m", 10, "--seed", 0, "--out", inst)
        assert run("oracle", inst, "--out", tmp_path / "x.txt") == 5

    def test_singleton_reports_na(self, tmp_path, capsys):
        inst = tmp_path / "one.txt"
        inst.write_text("1\n1 1\n1 1 5\n")
        assert run("enumerate", inst, "--out", tmp_path / "s.txt") == 0
        assert "mu_d=n/a" in capsys.readouterr().out

    def test_parse_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("1\n3 2\n1 1 zz\n")
        assert run("enumerate", bad, "--out", tmp_path / "x.txt") == 3

    def test_missing_file_exit_code(self, tmp_path):
        assert run("enumerate", tmp_path / "nope.txt") == 4

    def test_index_out_of_range(self, example_path):
        assert run("enumerate", example_path, "--index", 2) == 2


class TestSampleGreedyAndCompare:
    def test_requires_budget(self, example_path):
        assert run("sample-greedy", example_path) == 2

    def test_sample_greedy(self, example_path, tmp_path, capsys):
        out = tmp_path / "greedy.txt"
        assert run("sample-greedy", example_path, "--iters", 300, "--out", out) == 0
        assert "001 9" in out.read_text()

    def test_compare_emits_two_reports(self, example_path, tmp_path, capsys):
        assert (
            run(
                "compare", example_path, "--iters", 400,
                "--out-cp", tmp_path / "cp.txt", "--out-greedy", tmp_path / "gr.txt",
            )
            == 0
        )
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("cp:")
        assert lines[1].startswith("greedy:")
        assert (tmp_path / "cp.txt").exists() and (tmp_path / "gr.txt").exists()


class TestTransform:
    def test_writes_adjusted_instances(self, example_path, tmp_path, capsys):
        sols = tmp_path / "sols.txt"
        sols.write_text("001 9\n")
        q1 = tmp_path / "q1.txt"
        q2 = tmp_path / "q2.txt"
        assert (
            run(
                "transform", example_path, "--solutions", sols,
                "--alpha", "0.95", "--delta", 2, "--out-q1", q1, "--out-q2", q2,
            )
            == 0
        )
        assert "delta=2" in capsys.readouterr().out
        assert "1 1 -6" in q1.read_text()  # -4 - 2
        assert "3 3 11" in q1.read_text()  # 9 + 2
        assert "3 3 7" in q2.read_text()  # 9 - 2

    def test_solution_verification_failure(self, example_path, tmp_path):
        sols = tmp_path / "sols.txt"
        sols.write_text("001 8\n")
        assert run("transform", example_path, "--solutions", sols, "--delta", 2) == 3


class TestGridAndTTest:
    def test_grid_and_ttest_roundtrip(self, tmp_path, capsys):
        paths = []
        for seed in (31, 32, 33):
            p = tmp_path / f"g{seed}.txt"
            run("generate", "--n", 30, "--m", 90, "--seed", seed, "--out", p)
            paths.append(p)
        results = tmp_path / "results.jsonl"
        assert (
            run(
                "grid", *paths, "--iters", 100, "--seed", 2,
                "--top-k", 20, "--out", results,
            )
            == 0
        )
        rows = [json.loads(l) for l in results.read_text().splitlines()]
        cells = [r for r in rows if r["type"] == "cell"]
        summary = [r for r in rows if r["type"] == "row"]
        assert len(summary) == 3
        assert len(cells) == 3 * 9 * 2
        for row in summary:
            assert row["baseline_iters"] == 900
        assert run("ttest", results) == 0
        assert "verdict=" in capsys.readouterr().out

    def test_grid_deterministic_bytes(self, tmp_path):
        p = tmp_path / "one.txt"
        run("generate", "--n", 20, "--m", 40, "--seed", 8, "--out", p)
        out1 = tmp_path / "r1.jsonl"
        out2 = tmp_path / "r2.jsonl"
        run("grid", p, "--iters", 50, "--seed", 4, "--out", out1)
        run("grid", p, "--iters", 50, "--seed", 4, "--out", out2)
        assert out1.read_bytes() == out2.read_bytes()

    def test_ttest_fixture_value(self, tmp_path, capsys):
        results = tmp_path / "fixture.jsonl"
        rows = []
        for q1, q2 in ((1.0, 0.0), (0.0, 1.0), (2.0, 0.0), (0.5, 0.5)):
            rows.append({"type": "row", "instance": "x", "improv_q1": q1, "improv_q2": q2})
        results.write_text("".join(json.dumps(r) + "\n" for r in rows))
        assert run("ttest", results) == 0
        out = capsys.readouterr().out
        assert "t=0.774597" in out
        assert "df=3" in out
        assert "not significant" in out

    def test_ttest_identical_columns(self, tmp_path, capsys):
        results = tmp_path / "same.jsonl"
        rows = [
            {"type": "row", "instance": "a", "improv_q1": 1.0, "improv_q2": 1.0},
            {"type": "row", "instance": "b", "improv_q1": 2.0, "improv_q2": 2.0},
        ]
        results.write_text("".join(json.dumps(r) + "\n" for r in rows))
        assert run("ttest", results) == 0
        out = capsys.readouterr().out
        assert "t=0.000000" in out and "not significant" in out

    def test_ttest_single_row_errors(self, tmp_path):
        results = tmp_path / "single.jsonl"
        results.write_text(json.dumps({"type": "row", "improv_q1": 1.0, "improv_q2": 0.5}) + "\n")
        assert run("ttest", results) == 2
