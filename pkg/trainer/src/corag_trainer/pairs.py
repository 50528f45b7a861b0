"""Contrastive pair preparation.

Positive pairs share an optimal scorer label, negative pairs differ. Only
examples whose best scorer beats the runner-up by more than 10% relative
are admitted: when two scorers perform almost equally the label carries
little signal. Sampling is deterministic under the seed and balanced one
positive per negative by default.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Sequence

from .labels import TrainingExample

log = logging.getLogger(__name__)

GAP_THRESHOLD = 1.10  # best > 1.1 x second-best


@dataclass(frozen=True)
class ContrastivePair:
    a: int  # indices into the example list
    b: int
    is_positive: bool


def eligible(example: TrainingExample) -> bool:
    return example.gap_ratio() > GAP_THRESHOLD


def make_pairs(
    examples: Sequence[TrainingExample],
    ratio: float = 1.0,
    seed: int = 0,
) -> list[ContrastivePair]:
    """Sample positive and negative index pairs (ratio = positives per
    negative). All positive pairs are kept when fewer exist than the
    balanced count allows."""
    rng = random.Random(seed)
    admitted = [i for i, ex in enumerate(examples) if eligible(ex)]
    by_label: dict[int, list[int]] = {}
    for i in admitted:
        by_label.setdefault(examples[i].y_true, []).append(i)

    positives = []
    for indices in by_label.values():
        positives.extend(itertools.combinations(indices, 2))
    negatives = []
    labels = sorted(by_label)
    for la, lb in itertools.combinations(labels, 2):
        negatives.extend(itertools.product(by_label[la], by_label[lb]))

    if not negatives:
        log.warning("all admitted examples share one label; no negative pairs")
    rng.shuffle(positives)
    rng.shuffle(negatives)
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    n_pos = len(positives)
    n_neg = min(len(negatives), int(round(n_pos / ratio))) if n_pos else len(negatives)
    pairs = [ContrastivePair(a, b, True) for a, b in positives]
    pairs += [ContrastivePair(a, b, False) for a, b in negatives[:n_neg]]
    rng.shuffle(pairs)
    return pairs
