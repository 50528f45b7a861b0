import logging

import numpy as np
import pytest

from corag_trainer.labels import TrainingExample
from corag_trainer.pairs import eligible, make_pairs


def example(i, label, values):
    return TrainingExample(
        query_id=f"q{i}",
        x=np.zeros(4),
        y_true=label,
        p_true=(0.2, 0.0),
        scorer_values=tuple(values),
    )


class TestEligibility:
    def test_wide_gap_passes(self):
        assert eligible(example(0, 0, [0.9, 0.5, 0.4]))

    def test_narrow_gap_filtered(self):
        assert not eligible(example(0, 0, [0.9, 0.85, 0.4]))

    def test_exact_ten_percent_filtered(self):
        # Threshold is strict: "exceeding 10%".
        assert not eligible(example(0, 0, [1.1, 1.0]))


class TestMakePairs:
    def test_single_label_yields_no_negatives(self, caplog):
        examples = [example(i, 0, [0.9, 0.4]) for i in range(4)]
        with caplog.at_level(logging.WARNING):
            pairs = make_pairs(examples, seed=1)
        assert pairs and all(p.is_positive for p in pairs)
        assert any("no negative pairs" in r.message for r in caplog.records)

    def test_two_by_two_counts(self):
        examples = [
            example(0, 0, [0.9, 0.4]),
            example(1, 0, [0.9, 0.4]),
            example(2, 1, [0.4, 0.9]),
            example(3, 1, [0.4, 0.9]),
        ]
        pairs = make_pairs(examples, seed=0)
        positives = [p for p in pairs if p.is_positive]
        negatives = [p for p in pairs if not p.is_positive]
        assert len(positives) == 2  # (0,1) and (2,3)
        assert len(negatives) == 2  # balanced 1:1 out of the 4 candidates

    def test_positive_pairs_share_label(self):
        examples = [example(i, i % 3, [0.9, 0.4, 0.3]) for i in range(9)]
        for pair in make_pairs(examples, seed=5):
            same = examples[pair.a].y_true == examples[pair.b].y_true
            assert same == pair.is_positive

    def test_deterministic_under_seed(self):
        examples = [example(i, i % 2, [0.9, 0.4]) for i in range(10)]
        assert make_pairs(examples, seed=3) == make_pairs(examples, seed=3)
        assert make_pairs(examples, seed=3) != make_pairs(examples, seed=4)

    def test_filtered_examples_never_appear(self):
        examples = [
            example(0, 0, [0.9, 0.4]),
            example(1, 0, [0.9, 0.89]),  # gap too small
            example(2, 1, [0.4, 0.9]),
        ]
        pairs = make_pairs(examples, seed=0)
        used = {p.a for p in pairs} | {p.b for p in pairs}
        assert 1 not in used

    def test_ratio_validation(self):
        with pytest.raises(ValueError):
            make_pairs([example(0, 0, [0.9, 0.4])], ratio=0.0)
