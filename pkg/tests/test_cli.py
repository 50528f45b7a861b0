import json
import os
import time

import pytest

from corag.cli import main

FIXTURE = os.path.join(os.path.dirname(__file__), "data", "agent_router_weights.json")
DIM = 64


def write_corpus(path, docs):
    with open(path, "w") as fh:
        for doc_id, text in docs:
            fh.write(json.dumps({"id": doc_id, "text": text}) + "\n")


@pytest.fixture()
def corpus_file(tmp_path):
    path = str(tmp_path / "corpus.jsonl")
    docs = [
        (f"doc{i}", " ".join(f"word{i}x{j}" for j in range(40)) + " granite basalt quartz")
        for i in range(6)
    ]
    write_corpus(path, docs)
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestIngest:
    def test_ingest_reports_counts(self, corpus_file, tmp_path, capsys):
        out_path = str(tmp_path / "store.bin")
        code, out, _ = run(
            capsys, "ingest", "--input", corpus_file, "--chunk-size", "16",
            "--dimension", str(DIM), "--out", out_path,
        )
        assert code == 0
        assert "6 documents" in out
        assert os.path.exists(out_path)

    def test_rerun_is_byte_identical(self, corpus_file, tmp_path, capsys):
        p1, p2 = str(tmp_path / "s1.bin"), str(tmp_path / "s2.bin")
        for out_path in (p1, p2):
            code, _, _ = run(
                capsys, "ingest", "--input", corpus_file, "--chunk-size", "16",
                "--dimension", str(DIM), "--out", out_path,
            )
            assert code == 0
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_empty_input_is_validation_error(self, tmp_path, capsys):
        empty = str(tmp_path / "empty.jsonl")
        open(empty, "w").close()
        code, _, err = run(
            capsys, "ingest", "--input", empty, "--out", str(tmp_path / "s.bin")
        )
        assert code == 2
        assert "error" in err

    def test_duplicate_doc_id_is_validation_error(self, tmp_path, capsys):
        path = str(tmp_path / "dup.jsonl")
        write_corpus(path, [("d", "one"), ("d", "two")])
        code, _, err = run(capsys, "ingest", "--input", path, "--out", str(tmp_path / "s.bin"))
        assert code == 2
        assert "duplicate" in err

    def test_missing_input_file(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "ingest", "--input", str(tmp_path / "nope.jsonl"),
            "--out", str(tmp_path / "s.bin"),
        )
        assert code == 2


@pytest.fixture()
def store_file(corpus_file, tmp_path, capsys):
    out_path = str(tmp_path / "store.bin")
    code = main([
        "ingest", "--input", corpus_file, "--chunk-size", "16",
        "--dimension", str(DIM), "--out", out_path,
    ])
    capsys.readouterr()
    assert code == 0
    return out_path


class TestSearch:
    def test_single_query_json(self, store_file, capsys):
        code, out, _ = run(
            capsys, "search", "--store", store_file,
            "--query-text", "granite basalt quartz",
            "--budget", "48", "--iterations", "40",
        )
        assert code == 0
        payload = json.loads(out.strip())
        assert payload["cost_used"] <= 48
        assert set(payload) >= {"chunk_ids", "utility", "scorer_value", "chunks"}

    def test_same_seed_identical_output(self, store_file, capsys):
        argv = (
            "search", "--store", store_file, "--query-text", "granite basalt",
            "--budget", "48", "--seed", "7",
        )
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2

    def test_infeasible_budget_returns_empty(self, store_file, capsys):
        code, out, _ = run(
            capsys, "search", "--store", store_file,
            "--query-text", "granite", "--budget", "3",
        )
        assert code == 0
        payload = json.loads(out.strip())
        assert payload["chunk_ids"] == []
        assert payload["cost_used"] == 0

    def test_queries_file(self, store_file, tmp_path, capsys):
        queries = str(tmp_path / "queries.jsonl")
        with open(queries, "w") as fh:
            fh.write(json.dumps({"id": "q1", "text": "granite basalt"}) + "\n")
            fh.write(json.dumps({"id": "q2", "text": "word3x1 word3x2",
                                 "relevant_terms": ["word3x1"]}) + "\n")
        code, out, _ = run(
            capsys, "search", "--store", store_file, "--queries", queries,
            "--budget", "48",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert [json.loads(l)["query"] for l in lines] == ["q1", "q2"]

    def test_smoke_under_one_second_on_50_candidates(self, tmp_path, capsys):
        corpus = str(tmp_path / "big.jsonl")
        write_corpus(
            corpus,
            [(f"d{i}", " ".join(f"w{i}y{j}" for j in range(16))) for i in range(50)],
        )
        store = str(tmp_path / "big.bin")
        assert main(["ingest", "--input", corpus, "--chunk-size", "16",
                     "--dimension", str(DIM), "--out", store]) == 0
        capsys.readouterr()
        start = time.perf_counter()
        code, _, _ = run(
            capsys, "search", "--store", store, "--query-text", "w1y1 w2y2 w3y3",
            "--budget", "64", "--candidates", "50",
        )
        elapsed = time.perf_counter() - start
        assert code == 0
        assert elapsed < 1.0

    def test_missing_store_is_validation_error(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "search", "--store", str(tmp_path / "no.bin"), "--query-text", "x"
        )
        assert code == 2


class TestBench:
    def test_rows_to_file_and_determinism(self, tmp_path, capsys, monkeypatch):
        out1, out2 = str(tmp_path / "r1.jsonl"), str(tmp_path / "r2.jsonl")
        argv = [
            "bench", "--instances", "2", "--seed", "5", "--iterations", "20",
            "--dimension", str(DIM),
        ]
        monkeypatch.setenv("CORAG_THREADS", "1")
        assert main(argv + ["--out", out1]) == 0
        monkeypatch.setenv("CORAG_THREADS", "3")
        assert main(argv + ["--out", out2]) == 0
        capsys.readouterr()
        assert open(out1, "rb").read() == open(out2, "rb").read()
        rows = [json.loads(l) for l in open(out1)]
        assert all(r["cost_used"] <= r["budget"] for r in rows)
        assert all(r["oracle_ratio"] <= 1.0 + 1e-12 for r in rows)

    def test_strategy_subset(self, tmp_path, capsys):
        out = str(tmp_path / "rows.jsonl")
        code, _, err = run(
            capsys, "bench", "--instances", "1", "--strategies", "greedy",
            "--dimension", str(DIM), "--out", out,
        )
        assert code == 0
        rows = [json.loads(l) for l in open(out)]
        assert {r["strategy"] for r in rows} == {"greedy"}

    def test_unknown_strategy_rejected(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "bench", "--instances", "1", "--strategies", "alchemy",
            "--out", str(tmp_path / "r.jsonl"),
        )
        assert code == 2

    def test_aggregate_table_printed(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "bench", "--instances", "1", "--iterations", "10",
            "--dimension", str(DIM), "--out", str(tmp_path / "r.jsonl"),
        )
        assert code == 0
        assert "family" in err and "latency" in err


class TestAgentPredict:
    def test_prints_prediction(self, capsys):
        code, out, _ = run(
            capsys, "agent-predict", "--agent", FIXTURE,
            "--query-text", "spire facade buttress cornice archway",
        )
        assert code == 0
        payload = json.loads(out.strip())
        assert payload["label"] == "coverage"
        assert payload["iterations"] == 20
        assert payload["lambda"] == pytest.approx(0.1)

    def test_bad_weight_file(self, tmp_path, capsys):
        bad = str(tmp_path / "bad.json")
        open(bad, "w").write("{not json")
        code, _, err = run(capsys, "agent-predict", "--agent", bad, "--query-text", "x")
        assert code == 2


class TestInstanceGen:
    def test_writes_jsonl(self, tmp_path, capsys):
        out = str(tmp_path / "inst.jsonl")
        code, msg, _ = run(
            capsys, "instance-gen", "--seed", "3", "--count", "2",
            "--dimension", str(DIM), "--out", out,
        )
        assert code == 0
        lines = [json.loads(l) for l in open(out)]
        assert len(lines) == 6
        assert {l["family"] for l in lines} == {"monotone", "redundant", "ordered"}

    def test_deterministic(self, tmp_path, capsys):
        p1, p2 = str(tmp_path / "a.jsonl"), str(tmp_path / "b.jsonl")
        for p in (p1, p2):
            assert main(["instance-gen", "--seed", "3", "--count", "2", "--out", p]) == 0
        capsys.readouterr()
        assert open(p1, "rb").read() == open(p2, "rb").read()
