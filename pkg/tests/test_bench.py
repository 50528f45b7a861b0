import json
import os

import pytest

from corag import BenchOptions, SearchConfig, generate_instances, run_bench
from corag.bench import write_rows

DIM = 64


def options(iterations=60, **kwargs):
    return BenchOptions(
        config=SearchConfig(budget=1, iterations=iterations), **kwargs
    )


@pytest.fixture(scope="module")
def small_suite():
    return generate_instances(seed=101, count_per_family=4, dimension=DIM)


class TestRunBench:
    def test_rows_per_instance_and_strategy(self, small_suite):
        report = run_bench(small_suite, options())
        assert len(report.rows) == len(small_suite) * 3
        strategies = {r["strategy"] for r in report.rows}
        assert strategies == {"mcts", "greedy", "oracle"}

    def test_ratio_at_most_one_and_cost_within_budget(self, small_suite):
        report = run_bench(small_suite, options())
        for row in report.rows:
            assert row["oracle_ratio"] <= 1.0 + 1e-12
            assert row["cost_used"] <= row["budget"]

    def test_oracle_strategy_ratio_is_one(self, small_suite):
        report = run_bench(small_suite, options())
        for row in report.rows:
            if row["strategy"] == "oracle":
                assert row["oracle_ratio"] == pytest.approx(1.0)

    def test_rows_in_instance_order(self, small_suite):
        report = run_bench(small_suite, options())
        ids = [r["instance"] for r in report.rows]
        expected = [i.id for i in small_suite for _ in range(3)]
        assert ids == expected

    def test_aggregates_recomputable_from_rows(self, small_suite):
        report = run_bench(small_suite, options())
        for agg in report.aggregates():
            sub = [
                r for r in report.rows
                if r["family"] == agg["family"] and r["strategy"] == agg["strategy"]
            ]
            assert agg["instances"] == len(sub)
            assert agg["mean_oracle_ratio"] == pytest.approx(
                sum(r["oracle_ratio"] for r in sub) / len(sub)
            )
            assert agg["mean_cost"] == pytest.approx(
                sum(r["cost_used"] for r in sub) / len(sub)
            )

    def test_thread_count_does_not_change_rows(self, small_suite, monkeypatch):
        monkeypatch.setenv("CORAG_THREADS", "1")
        serial = run_bench(small_suite, options())
        monkeypatch.setenv("CORAG_THREADS", "4")
        threaded = run_bench(small_suite, options())
        assert serial.rows == threaded.rows

    def test_rows_have_no_timing_by_default(self, small_suite):
        report = run_bench(small_suite[:2], options())
        assert all("wall_time_ms" not in r for r in report.rows)
        timed = run_bench(small_suite[:2], options(include_timing=True))
        assert all("wall_time_ms" in r for r in timed.rows)

    def test_scorer_override_changes_search_not_eval(self, small_suite):
        redundant = [i for i in small_suite if i.family == "redundant"]
        report = run_bench(redundant, options(scorer_override="additive"))
        for row in report.rows:
            assert row["scorer"] == "additive"
            assert row["eval_scorer"] == "coverage"

    def test_budget_override(self, small_suite):
        report = run_bench(small_suite[:2], options(budget_override=64))
        assert all(r["budget"] == 64 for r in report.rows)
        assert all(r["cost_used"] <= 64 for r in report.rows)

    def test_write_rows_jsonl(self, small_suite, tmp_path):
        report = run_bench(small_suite[:2], options())
        path = str(tmp_path / "rows.jsonl")
        write_rows(report.rows, path)
        lines = open(path).read().splitlines()
        assert len(lines) == len(report.rows)
        assert [json.loads(l) for l in lines] == report.rows

    def test_byte_identical_reports(self, small_suite, tmp_path, monkeypatch):
        paths = []
        for threads, name in (("1", "a.jsonl"), ("3", "b.jsonl")):
            monkeypatch.setenv("CORAG_THREADS", threads)
            report = run_bench(small_suite, options())
            path = str(tmp_path / name)
            write_rows(report.rows, path)
            paths.append(path)
        assert open(paths[0], "rb").read() == open(paths[1], "rb").read()
