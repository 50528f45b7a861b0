"""Comparator strategies: greedy budget-filling and the exhaustive oracle.

The oracle enumerates every feasible ordered combination (up to a length
cap) and is the ground truth that search quality is measured against; the
greedy strategy is the classic rank-then-fill baseline that ignores chunk
interactions.
"""

from __future__ import annotations

import time
from typing import Mapping, Sequence

from .corpus import Chunk, Query, tokenize
from .errors import OracleSizeError
from .mcts import SearchResult
from .scorers import Combination, CountingScorer, UtilityScorer

ORACLE_CANDIDATE_GUARD = 12
ORACLE_MAX_LEN = 6


def _verify_cost(ids: Sequence[str], chunks: Mapping[str, Chunk], budget: int) -> int:
    exact = sum(len(tokenize(chunks[i].text)) for i in ids)
    if exact > budget:
        raise RuntimeError(f"exact cost {exact} exceeds budget {budget} for {ids}")
    return exact


def greedy_topk(
    query: Query,
    candidates: Sequence[Chunk],
    budget: int,
    scorer: UtilityScorer,
) -> SearchResult:
    """Score each candidate alone, then fill the budget in rank order.

    Candidates are sorted by descending single-chunk score (ties: lower
    cost, then id) and appended in that order, skipping any chunk that
    would push the total past the budget.
    """
    start = time.perf_counter()
    counting = CountingScorer(scorer)
    chunks = {c.id: c for c in candidates}
    if candidates:
        singles = [Combination((c.id,), c.token_count) for c in candidates]
        scores = counting.score_batch(query, singles, chunks)
        order = sorted(
            range(len(candidates)),
            key=lambda i: (-scores[i], candidates[i].token_count, candidates[i].id),
        )
    else:
        order = []
    picked: list[str] = []
    cost = 0
    for i in order:
        chunk = candidates[i]
        if cost + chunk.token_count <= budget:
            picked.append(chunk.id)
            cost += chunk.token_count
    combo = Combination(tuple(picked), cost)
    value = counting.score_batch(query, [combo], chunks)[0] if picked else 0.0
    return SearchResult(
        best=combo,
        utility=value,
        scorer_value=value,
        cost_used=_verify_cost(picked, chunks, budget),
        nodes_materialized=0,
        scorer_calls=counting.batch_calls,
        iterations_run=0,
        wall_time=time.perf_counter() - start,
    )


def exhaustive_oracle(
    query: Query,
    candidates: Sequence[Chunk],
    budget: int,
    scorer: UtilityScorer,
    max_len: int = ORACLE_MAX_LEN,
) -> SearchResult:
    """Enumerate all feasible ordered combinations and return the best.

    Every sequence of distinct candidates with length <= max_len and total
    cost <= budget is scored, including the empty sequence (selecting
    nothing can be optimal under a non-monotone scorer). Refuses more than
    12 candidates: the sequence count grows factorially.
    """
    if len(candidates) > ORACLE_CANDIDATE_GUARD:
        raise OracleSizeError(
            f"exhaustive enumeration refused: {len(candidates)} candidates "
            f"exceeds the guard of {ORACLE_CANDIDATE_GUARD}"
        )
    start = time.perf_counter()
    counting = CountingScorer(scorer)
    chunks = {c.id: c for c in candidates}
    sequences: list[Combination] = [Combination((), 0)]
    # Depth-first extension; any sequence over budget only gets costlier.
    stack: list[tuple[tuple[str, ...], int]] = [((), 0)]
    while stack:
        ids, cost = stack.pop()
        if len(ids) >= max_len:
            continue
        used = set(ids)
        for cand in candidates:
            if cand.id in used:
                continue
            ext_cost = cost + cand.token_count
            if ext_cost > budget:
                continue
            ext = ids + (cand.id,)
            sequences.append(Combination(ext, ext_cost))
            stack.append((ext, ext_cost))
    values = counting.score_batch(query, sequences, chunks)
    best_idx = min(
        range(len(sequences)),
        key=lambda i: (-values[i], sequences[i].total_cost, sequences[i].chunk_ids),
    )
    best = sequences[best_idx]
    return SearchResult(
        best=best,
        utility=values[best_idx],
        scorer_value=values[best_idx],
        cost_used=_verify_cost(best.chunk_ids, chunks, budget),
        nodes_materialized=len(sequences),
        scorer_calls=counting.batch_calls,
        iterations_run=0,
        wall_time=time.perf_counter() - start,
    )
