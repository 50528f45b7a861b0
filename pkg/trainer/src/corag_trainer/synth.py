"""Synthetic training clusters with planted vocabularies.

Three clusters, one per scorer label, each drawing its relevant terms from
a disjoint lexicon so the query embedding alone identifies the cluster:

* additive: a handful of single-term chunks dominated by repeated query
  vocabulary. Term coverage stays low (one term per chunk), so the
  noisy-OR scorer wins by a wide margin.
* coverage: five chunks covering two disjoint terms each, diluted with
  filler. Full coverage needs all five, which drags the position-discount
  scorer down while coverage reaches 1.0.
* order: one chunk carries six of eight terms and two completion chunks
  add one new term each while repeating five covered ones. The heavy
  overlap crushes the redundancy-penalized coverage score, but ordering
  the big chunk first keeps the position-discounted score high.

The label generation scorer set uses a sharper redundancy penalty and a
gentler position discount than the engine defaults; with the defaults the
position-discount scorer can never clear the pair filter's 10% gap (its
best value trails the coverage score structurally).
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass

from corag import Chunk, Query, UtilityScorer, make_chunk, make_query, make_scorer
from corag.instances import (
    FAMILY_FILLER,
    MONOTONE_TERMS,
    ORDERED_TERMS,
    REDUNDANT_TERMS,
)

CLUSTERS = ("additive", "coverage", "order")

CLUSTER_LEXICON = {
    "additive": (MONOTONE_TERMS, FAMILY_FILLER["monotone"]),
    "coverage": (REDUNDANT_TERMS, FAMILY_FILLER["redundant"]),
    "order": (ORDERED_TERMS, FAMILY_FILLER["ordered"]),
}

LABELING_RHO = 0.25
LABELING_GAMMA = 0.93


def labeling_scorers() -> list[UtilityScorer]:
    """Scorer set used to annotate training data, in label order."""
    return [
        make_scorer("additive"),
        make_scorer("coverage", rho=LABELING_RHO),
        make_scorer("order", gamma=LABELING_GAMMA),
    ]


@dataclass(frozen=True)
class LabeledInstance:
    id: str
    cluster: str
    query: Query
    candidates: tuple[Chunk, ...]
    budget: int


def _rng(seed: int, cluster: str, index: int) -> random.Random:
    digest = hashlib.blake2b(
        f"trainer/{seed}/{cluster}/{index}".encode(), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "little"))


def _pad(rng, tokens, filler, size):
    tokens = list(tokens)
    while len(tokens) < size:
        tokens.append(rng.choice(filler))
    rng.shuffle(tokens)
    return tokens[:size]


def _make_additive(instance_id, rng, dimension):
    terms_pool, filler = CLUSTER_LEXICON["additive"]
    terms = rng.sample(terms_pool, 8)
    size = rng.randint(18, 24)
    covering = terms[:4]
    chunks = []
    for j, term in enumerate(covering):
        reps = max(3, int(size * 0.6))
        chunks.append(
            make_chunk(f"{instance_id}.c{j:02d}", _pad(rng, [term] * reps, filler, size), dimension)
        )
    for j in range(4, 8):
        chunks.append(
            make_chunk(f"{instance_id}.c{j:02d}", _pad(rng, [], filler, size), dimension)
        )
    query = make_query(
        f"{instance_id}.q",
        " ".join(terms) + f" {rng.choice(filler)} {rng.choice(filler)}",
        terms,
        dimension,
    )
    return LabeledInstance(instance_id, "additive", query, tuple(chunks), 4 * size)


def _make_coverage(instance_id, rng, dimension):
    terms_pool, filler = CLUSTER_LEXICON["coverage"]
    terms = rng.sample(terms_pool, 10)
    size = rng.randint(18, 24)
    chunks = []
    for j in range(5):
        own = terms[2 * j : 2 * j + 2]
        chunks.append(
            make_chunk(f"{instance_id}.c{j:02d}", _pad(rng, own * 2, filler, size), dimension)
        )
    for j in range(5, 8):
        chunks.append(
            make_chunk(f"{instance_id}.c{j:02d}", _pad(rng, [], filler, size), dimension)
        )
    query = make_query(
        f"{instance_id}.q",
        " ".join(terms) + f" {rng.choice(filler)}",
        terms,
        dimension,
    )
    return LabeledInstance(instance_id, "coverage", query, tuple(chunks), 5 * size)


def _make_order(instance_id, rng, dimension):
    terms_pool, filler = CLUSTER_LEXICON["order"]
    terms = rng.sample(terms_pool, 8)
    # Extra filler keeps the chunks' cosine relevance low enough that the
    # noisy-OR scorer stays clearly behind the position-discounted one.
    size = rng.randint(26, 32)
    head, tail = terms[:6], terms[6:]
    chunks = [
        make_chunk(f"{instance_id}.c00", _pad(rng, head, filler, size), dimension)
    ]
    for j, term in enumerate(tail, start=1):
        overlap = rng.sample(head, 5)
        chunks.append(
            make_chunk(f"{instance_id}.c{j:02d}", _pad(rng, [term] + overlap, filler, size), dimension)
        )
    for j in range(3, 8):
        chunks.append(
            make_chunk(f"{instance_id}.c{j:02d}", _pad(rng, [], filler, size), dimension)
        )
    query = make_query(
        f"{instance_id}.q",
        " ".join(terms) + f" {rng.choice(filler)}",
        terms,
        dimension,
    )
    return LabeledInstance(instance_id, "order", query, tuple(chunks), 3 * size)


_MAKERS = {
    "additive": _make_additive,
    "coverage": _make_coverage,
    "order": _make_order,
}


def generate_clusters(
    seed: int, count_per_cluster: int, dimension: int = 1024
) -> list[LabeledInstance]:
    instances = []
    for cluster in CLUSTERS:
        for i in range(count_per_cluster):
            rng = _rng(seed, cluster, i)
            instances.append(_MAKERS[cluster](f"{cluster}-{i:04d}", rng, dimension))
    return instances


def write_dataset(instances: list[LabeledInstance], corpus_path: str, queries_path: str) -> None:
    """Flatten instances into the engine's corpus/query JSONL schemas; each
    candidate chunk becomes one document."""
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for inst in instances:
            for chunk in inst.candidates:
                fh.write(json.dumps({"id": chunk.id, "text": chunk.text}) + "\n")
    with open(queries_path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(
                json.dumps(
                    {
                        "id": inst.query.id,
                        "text": inst.query.text,
                        "relevant_terms": sorted(inst.query.relevant_terms),
                    }
                )
                + "\n"
            )
