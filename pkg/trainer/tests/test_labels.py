import logging

import numpy as np
import pytest

from corag import make_chunk, make_query, tokenize
from corag_trainer.labels import ITERATIONS_GRID, LAMBDA_GRID, generate_labels, label_example
from corag_trainer.synth import labeling_scorers

DIM = 64


def chunk_of(cid, text):
    return make_chunk(cid, tokenize(text), DIM)


class TestLabelExample:
    def test_requires_two_scorers(self):
        query = make_query("q", "alpha", ["alpha"], DIM)
        with pytest.raises(ValueError, match="2"):
            label_example(query, [chunk_of("c", "alpha")], 10, labeling_scorers()[:1])

    def test_empty_candidates_skipped_with_warning(self, caplog):
        query = make_query("q", "alpha", ["alpha"], DIM)
        with caplog.at_level(logging.WARNING):
            assert label_example(query, [], 10, labeling_scorers()) is None
        assert any("empty candidate set" in r.message for r in caplog.records)

    def test_single_chunk_degenerate_agreement(self):
        # All relevant terms in one chunk: coverage and order both hit 1.0,
        # the noisy-OR stays below; the argmax resolves to the first of the
        # tied scorers and the gap filter reports a ratio of exactly 1.
        query = make_query("q", "alpha beta", ["alpha", "beta"], DIM)
        example = label_example(
            query, [chunk_of("c", "alpha beta pad")], 10, labeling_scorers()
        )
        assert example.scorer_values[1] == pytest.approx(1.0)
        assert example.scorer_values[2] == pytest.approx(1.0)
        assert example.y_true == 1  # coverage listed before order
        assert example.gap_ratio() == pytest.approx(1.0)

    def test_redundancy_heavy_query_selects_coverage(self):
        query = make_query(
            "q", "find", ["t1", "t2", "t3", "t4", "t5", "t6"], DIM
        )
        chunks = [
            chunk_of("dup1", "t1 t2 t3 pad pad2"),
            chunk_of("dup2", "t1 t2 t3 var pad3"),
            chunk_of("c1", "t4 t5 other filler pad4"),
            chunk_of("c2", "t6 more filler words pad5"),
        ]
        example = label_example(query, chunks, budget=15, scorers=labeling_scorers())
        assert example.y_true == 1

    def test_p_true_in_unit_square_and_on_grid(self):
        query = make_query("q", "alpha beta", ["alpha", "beta"], DIM)
        chunks = [chunk_of("a", "alpha x"), chunk_of("b", "beta y")]
        example = label_example(query, chunks, 10, labeling_scorers())
        iters_norm, lam_norm = example.p_true
        assert 0.0 <= iters_norm <= 1.0 and 0.0 <= lam_norm <= 1.0
        assert round(iters_norm * 50) in ITERATIONS_GRID
        assert any(abs(lam_norm * 0.5 - lam) < 1e-12 for lam in LAMBDA_GRID)

    def test_grid_point_reproducible(self):
        query = make_query("q", "find", ["t1", "t2", "t3", "t4"], DIM)
        chunks = [
            chunk_of("a", "t1 t2 pad"),
            chunk_of("b", "t3 fill pad"),
            chunk_of("c", "t4 fill pad"),
            chunk_of("d", "t1 noise pad"),
        ]
        e1 = label_example(query, chunks, 9, labeling_scorers())
        e2 = label_example(query, chunks, 9, labeling_scorers())
        assert e1.p_true == e2.p_true
        assert e1.y_true == e2.y_true
        assert e1.scorer_values == e2.scorer_values


class TestGenerateLabels:
    def test_retrieval_pipeline(self):
        chunks = [
            chunk_of("r1", "alpha beta gamma pad"),
            chunk_of("r2", "alpha noise filler pad"),
            chunk_of("r3", "unrelated words here pad"),
            chunk_of("r4", "delta epsilon zeta pad"),
        ]
        queries = [
            make_query("q1", "alpha beta gamma", ["alpha", "beta", "gamma"], DIM),
            make_query("q2", "delta epsilon", ["delta", "epsilon"], DIM),
        ]
        examples = generate_labels(
            queries, chunks, labeling_scorers(), budget=12,
            candidates_per_query=3, dimension=DIM,
        )
        assert len(examples) == 2
        assert [e.query_id for e in examples] == ["q1", "q2"]
        for example in examples:
            assert example.x.shape == (DIM,)
            assert 0 <= example.y_true < 3
