"""Label generation: the optimal scorer and search settings per query.

For each query the exhaustive oracle runs once per candidate scorer; the
scorer with the highest oracle value becomes the classification target.
The regression target is the smallest (iterations, cost coefficient) grid
point whose search result reaches 99% of that oracle value, normalized to
[0, 1] by the export scale.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from corag import (
    Chunk,
    Query,
    SearchConfig,
    UtilityScorer,
    VectorStore,
    exhaustive_oracle,
    search,
)

log = logging.getLogger(__name__)

ITERATIONS_GRID = (5, 10, 20, 50)
LAMBDA_GRID = (0.0, 0.1, 0.2, 0.3)
GRID_TARGET = 0.99

MAX_ITERATIONS_SCALE = 50
LAMBDA_MAX_SCALE = 0.5


@dataclass(frozen=True)
class TrainingExample:
    query_id: str
    x: np.ndarray  # query embedding
    y_true: int  # index into the scorer-name list
    p_true: tuple[float, float]  # (iterations, lambda), normalized to [0, 1]
    scorer_values: tuple[float, ...]  # oracle value per scorer, label order

    def gap_ratio(self) -> float:
        """Best-vs-second oracle value ratio; inf when the runner-up is 0."""
        ordered = sorted(self.scorer_values, reverse=True)
        if len(ordered) < 2 or ordered[0] == 0.0:
            return 1.0
        if ordered[1] == 0.0:
            return float("inf")
        return ordered[0] / ordered[1]


def label_example(
    query: Query,
    candidates: Sequence[Chunk],
    budget: int,
    scorers: Sequence[UtilityScorer],
) -> TrainingExample | None:
    """Label one query against its candidate set; None when unlabelable."""
    if len(scorers) < 2:
        raise ValueError("need at least 2 candidate scorers")
    if not candidates:
        log.warning("query %s: empty candidate set, skipped", query.id)
        return None
    values = []
    for scorer in scorers:
        values.append(exhaustive_oracle(query, candidates, budget, scorer).scorer_value)
    best = int(np.argmax(values))
    p_true = _grid_search(query, candidates, budget, scorers[best], values[best])
    return TrainingExample(
        query_id=query.id,
        x=query.embedding.astype(np.float64),
        y_true=best,
        p_true=p_true,
        scorer_values=tuple(values),
    )


def _grid_search(query, candidates, budget, scorer, oracle_value):
    """Smallest grid point reaching 99% of the oracle value; if none does,
    the best-achieving point (ties toward the smaller settings)."""
    fallback = (ITERATIONS_GRID[-1], LAMBDA_GRID[0])
    fallback_value = -1.0
    for iterations in ITERATIONS_GRID:
        for lam in LAMBDA_GRID:
            cfg = SearchConfig(budget=budget, iterations=iterations, lam=lam,
                               scorer_name=scorer.name)
            value = search(query, candidates, cfg, scorer).scorer_value
            if oracle_value <= 0.0 or value >= GRID_TARGET * oracle_value:
                return _normalize(iterations, lam)
            if value > fallback_value:
                fallback, fallback_value = (iterations, lam), value
    return _normalize(*fallback)


def _normalize(iterations: int, lam: float) -> tuple[float, float]:
    return (iterations / MAX_ITERATIONS_SCALE, lam / LAMBDA_MAX_SCALE)


def generate_labels(
    queries: Sequence[Query],
    chunks: Sequence[Chunk],
    scorers: Sequence[UtilityScorer],
    budget: int,
    candidates_per_query: int = 8,
    dimension: int | None = None,
) -> list[TrainingExample]:
    """Retrieve candidates for each query from the chunk pool, then label.

    The retrieval step matches the engine pipeline: top-n by cosine
    similarity from an in-memory store over the full chunk set.
    """
    if len(scorers) < 2:
        raise ValueError("need at least 2 candidate scorers")
    dim = dimension or (chunks[0].embedding.shape[0] if chunks else 1024)
    store = VectorStore(dim)
    store.insert_many(chunks)
    examples = []
    for query in queries:
        candidates = store.top_n(query, candidates_per_query)
        example = label_example(query, candidates, budget, scorers)
        if example is not None:
            examples.append(example)
    return examples
