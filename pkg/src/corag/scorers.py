"""Batch utility scorers for ordered chunk combinations.

A scorer is the black-box stand-in for a reranker model: it maps a query
plus a batch of ordered combinations to values in [0, 1] and promises
nothing about structure (no linearity, no monotonicity). The three
built-ins deliberately exhibit the failure modes a search strategy must
survive: "additive" is monotone and order-free (greedy-friendly),
"coverage" penalizes redundant content (adding a chunk can lower the
value), and "order" discounts terms that first appear late in the
sequence (permutations of one set score differently).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import Chunk, Query, tokenize
from .errors import ScoringError


@dataclass(frozen=True)
class Combination:
    """An ordered sequence of distinct chunk ids plus its exact token cost."""

    chunk_ids: tuple[str, ...]
    total_cost: int

    def __post_init__(self):
        if len(set(self.chunk_ids)) != len(self.chunk_ids):
            raise ValueError(f"duplicate chunk ids in combination: {self.chunk_ids}")
        if self.total_cost < 0:
            raise ValueError(f"negative total_cost: {self.total_cost}")

    @classmethod
    def of(cls, chunk_ids: Sequence[str], chunks: Mapping[str, Chunk]) -> "Combination":
        return cls(tuple(chunk_ids), sum(chunks[i].token_count for i in chunk_ids))


EMPTY_COMBINATION = Combination((), 0)


class UtilityScorer:
    """Interface: deterministic batch scoring with values in [0, 1]."""

    name: str

    def score_batch(
        self,
        query: Query,
        combinations: Sequence[Combination],
        chunks: Mapping[str, Chunk],
    ) -> list[float]:
        raise NotImplementedError

    def score_one(
        self, query: Query, combination: Combination, chunks: Mapping[str, Chunk]
    ) -> float:
        return self.score_batch(query, [combination], chunks)[0]


def _resolve(chunk_id: str, chunks: Mapping[str, Chunk]) -> Chunk:
    try:
        return chunks[chunk_id]
    except KeyError:
        raise ScoringError(f"unresolvable chunk id: {chunk_id!r}") from None


def _query_terms(query: Query) -> frozenset[str]:
    # Ground-truth terms when provided; otherwise the query's own tokens.
    if query.relevant_terms:
        return query.relevant_terms
    return frozenset(tokenize(query.text))


class AdditiveScorer(UtilityScorer):
    """Noisy-OR of per-chunk relevances: V = 1 - prod(1 - rel(chunk)).

    rel(chunk) = max(0, cosine(chunk, query)). Order-insensitive and
    monotone under set inclusion, so greedy strategies do well here.
    """

    name = "additive"

    def score_batch(self, query, combinations, chunks):
        rel_cache: dict[str, float] = {}
        q = query.embedding.astype(np.float64)
        values = []
        for combo in combinations:
            miss = 1.0
            for chunk_id in combo.chunk_ids:
                rel = rel_cache.get(chunk_id)
                if rel is None:
                    chunk = _resolve(chunk_id, chunks)
                    rel = max(0.0, float(chunk.embedding.astype(np.float64) @ q))
                    rel_cache[chunk_id] = rel
                miss *= 1.0 - rel
            values.append(min(1.0, max(0.0, 1.0 - miss)) if combo.chunk_ids else 0.0)
        return values


class CoverageScorer(UtilityScorer):
    """Term coverage with a redundancy penalty; not monotone.

    With Q the relevant term set, covered the distinct terms of Q present
    in the combination, and duplicates the surplus term incidences
    (sum over chunks of |terms(chunk) & Q| minus |covered|):

        V = clamp(|covered|/|Q| - rho * duplicates/|Q|, 0, 1)
    """

    name = "coverage"

    def __init__(self, rho: float = 0.05):
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {rho}")
        self.rho = rho

    def score_batch(self, query, combinations, chunks):
        terms = _query_terms(query)
        if not terms:
            return [0.0 for _ in combinations]
        term_index = {t: i for i, t in enumerate(sorted(terms))}
        n_terms = len(term_index)
        mask_cache: dict[str, tuple[int, int]] = {}  # id -> (bitmask, hit count)
        values = []
        for combo in combinations:
            if not combo.chunk_ids:
                values.append(0.0)
                continue
            covered_mask = 0
            incidences = 0
            for chunk_id in combo.chunk_ids:
                cached = mask_cache.get(chunk_id)
                if cached is None:
                    chunk = _resolve(chunk_id, chunks)
                    mask = 0
                    hits = 0
                    for t in set(tokenize(chunk.text)):
                        idx = term_index.get(t)
                        if idx is not None:
                            mask |= 1 << idx
                            hits += 1
                    cached = (mask, hits)
                    mask_cache[chunk_id] = cached
                covered_mask |= cached[0]
                incidences += cached[1]
            covered = bin(covered_mask).count("1")
            duplicates = incidences - covered
            value = covered / n_terms - self.rho * duplicates / n_terms
            values.append(min(1.0, max(0.0, value)))
        return values


class OrderScorer(UtilityScorer):
    """Position-discounted coverage: terms count more the earlier the first
    chunk containing them appears.

        V = (1/|Q|) * sum over t in Q of gamma^(p(t) - 1)

    p(t) is the 1-based position of the first chunk covering t; uncovered
    terms contribute 0. gamma = 1 makes every permutation equivalent.
    """

    name = "order"

    def __init__(self, gamma: float = 0.9):
        if not 0.0 < gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {gamma}")
        self.gamma = gamma

    def score_batch(self, query, combinations, chunks):
        terms = _query_terms(query)
        if not terms:
            return [0.0 for _ in combinations]
        term_index = {t: i for i, t in enumerate(sorted(terms))}
        n_terms = len(term_index)
        mask_cache: dict[str, int] = {}
        values = []
        for combo in combinations:
            if not combo.chunk_ids:
                values.append(0.0)
                continue
            seen_mask = 0
            total = 0.0
            discount = 1.0
            for chunk_id in combo.chunk_ids:
                mask = mask_cache.get(chunk_id)
                if mask is None:
                    chunk = _resolve(chunk_id, chunks)
                    mask = 0
                    for t in set(tokenize(chunk.text)):
                        idx = term_index.get(t)
                        if idx is not None:
                            mask |= 1 << idx
                    mask_cache[chunk_id] = mask
                new = mask & ~seen_mask
                if new:
                    total += discount * bin(new).count("1")
                seen_mask |= mask
                discount *= self.gamma
            values.append(min(1.0, max(0.0, total / n_terms)))
        return values


class CountingScorer(UtilityScorer):
    """Wrapper that counts batch calls and scored combinations."""

    def __init__(self, inner: UtilityScorer):
        self.inner = inner
        self.name = inner.name
        self.batch_calls = 0
        self.scored = 0

    def score_batch(self, query, combinations, chunks):
        self.batch_calls += 1
        self.scored += len(combinations)
        return self.inner.score_batch(query, combinations, chunks)


SCORER_NAMES = ("additive", "coverage", "order")


def make_scorer(name: str, rho: float = 0.05, gamma: float = 0.9) -> UtilityScorer:
    """Build a scorer by CLI name; rho and gamma apply where relevant."""
    if name == "additive":
        return AdditiveScorer()
    if name == "coverage":
        return CoverageScorer(rho=rho)
    if name == "order":
        return OrderScorer(gamma=gamma)
    raise ValueError(f"unknown scorer {name!r}; expected one of {SCORER_NAMES}")
