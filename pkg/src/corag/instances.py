"""Seeded synthetic benchmark instances.

Three families stress different failure modes of a selection strategy:

* MONOTONE: relevant terms spread uniformly across chunks with no
  duplication; utility grows with every added chunk, so rank-and-fill
  strategies do well. Evaluated with the additive scorer.
* REDUNDANT: clusters of near-duplicate chunks covering the same core
  terms plus a few complementary chunks. Filling the budget with
  top-scoring chunks wastes it on repeats, and the best combination
  leaves budget unused. Evaluated with the coverage scorer. Half of the
  instances use a "decoy" variant where the highest-scoring single chunk
  does not belong to the optimal combination at all, so pure exploitation
  gets trapped in its subtree.
* ORDERED: one chunk carries most of the terms, so the sequence position
  of each chunk changes the value. Evaluated with the order scorer.

Every instance is derived from (seed, family, index) through a stable
64-bit hash, so generation is deterministic across platforms and
independent of generation order.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass

from .corpus import Chunk, Query, make_chunk, make_query, tokenize, DEFAULT_DIMENSION

FAMILIES = ("monotone", "redundant", "ordered")

EVAL_SCORERS = {
    "monotone": "additive",
    "redundant": "coverage",
    "ordered": "order",
}

# Disjoint per-family vocabularies. Queries draw their relevant terms from
# the family lexicon, which is what lets a configuration agent recognize
# the query domain from the embedding alone.
MONOTONE_TERMS = (
    "granite", "basalt", "quartz", "feldspar", "mica", "shale", "slate",
    "marble", "limestone", "sandstone", "gneiss", "schist", "obsidian",
    "pumice", "magma", "sediment", "stratum", "fossil", "mineral",
    "crystal", "tectonic", "rift", "ridge", "crater", "geyser", "aquifer",
    "bedrock", "moraine", "caldera", "lava",
)

REDUNDANT_TERMS = (
    "spire", "facade", "buttress", "cornice", "archway", "vault", "nave",
    "column", "pediment", "frieze", "balustrade", "parapet", "gable",
    "turret", "portico", "colonnade", "atrium", "cupola", "lintel",
    "mullion", "keystone", "transept", "cloister", "rotunda", "dome",
    "arcade", "pilaster", "architrave", "spandrel", "tracery",
)

ORDERED_TERMS = (
    "simmer", "marinate", "whisk", "dice", "saute", "braise", "glaze",
    "caramelize", "knead", "proofing", "sear", "baste", "julienne",
    "blanch", "deglaze", "poach", "temper", "precook", "zest", "garnish",
    "render", "emulsify", "macerate", "scoring", "brine", "toasting",
    "steep", "infuse", "sift", "churn",
)

FAMILY_TERMS = {
    "monotone": MONOTONE_TERMS,
    "redundant": REDUNDANT_TERMS,
    "ordered": ORDERED_TERMS,
}

MONOTONE_FILLER = (
    "survey", "report", "field", "sample", "region", "study", "note",
    "data", "map", "site", "layer", "area", "test", "depth", "record",
    "zone", "unit", "team", "year", "method", "value", "result", "source",
    "basin", "range", "grid", "plot", "trench", "core", "probe",
)

REDUNDANT_FILLER = (
    "tour", "guide", "visitor", "plan", "drawing", "sketch", "photo",
    "archive", "restore", "budget", "stone", "brick", "mortar", "wall",
    "roof", "tower", "gate", "bridge", "castle", "palace", "museum",
    "heritage", "landmark", "city", "plaza", "street", "garden",
    "fountain", "statue", "monument",
)

ORDERED_FILLER = (
    "recipe", "kitchen", "pan", "bowl", "oven", "heat", "cook", "chef",
    "serve", "plate", "taste", "flavor", "salt", "pepper", "oil",
    "butter", "flour", "sugar", "cream", "sauce", "onion", "garlic",
    "tomato", "basil", "thyme", "lemon", "stock", "broth", "dish", "meal",
)

FAMILY_FILLER = {
    "monotone": MONOTONE_FILLER,
    "redundant": REDUNDANT_FILLER,
    "ordered": ORDERED_FILLER,
}


@dataclass(frozen=True)
class Instance:
    id: str
    family: str
    query: Query
    candidates: tuple[Chunk, ...]
    budget: int
    eval_scorer: str

    def chunk_lookup(self) -> dict[str, Chunk]:
        return {c.id: c for c in self.candidates}

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "family": self.family,
            "eval_scorer": self.eval_scorer,
            "budget": self.budget,
            "query": {
                "id": self.query.id,
                "text": self.query.text,
                "relevant_terms": sorted(self.query.relevant_terms),
            },
            "chunks": [{"id": c.id, "text": c.text} for c in self.candidates],
        }

    @classmethod
    def from_json(cls, doc: dict, dimension: int = DEFAULT_DIMENSION) -> "Instance":
        query = make_query(
            doc["query"]["id"],
            doc["query"]["text"],
            doc["query"].get("relevant_terms"),
            dimension,
        )
        candidates = tuple(
            make_chunk(c["id"], tokenize(c["text"]), dimension) for c in doc["chunks"]
        )
        return cls(
            id=doc["id"],
            family=doc["family"],
            query=query,
            candidates=candidates,
            budget=int(doc["budget"]),
            eval_scorer=doc["eval_scorer"],
        )


def _instance_rng(seed: int, family: str, index: int) -> random.Random:
    # str hashes are salted per process; derive the stream from a fixed hash.
    digest = hashlib.blake2b(
        f"{seed}/{family}/{index}".encode("utf-8"), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "little"))


def _fill_tokens(rng: random.Random, tokens: list[str], filler: tuple[str, ...], size: int) -> list[str]:
    while len(tokens) < size:
        tokens.append(rng.choice(filler))
    return tokens[:size]


def _chunk(instance_id: str, index: int, tokens: list[str], dimension: int) -> Chunk:
    return make_chunk(f"{instance_id}.c{index:02d}", tokens, dimension)


def _repeat_terms(rng: random.Random, terms: list[str], copies: int) -> list[str]:
    tokens = []
    for _ in range(copies):
        tokens.extend(terms)
    rng.shuffle(tokens)
    return tokens


def _make_monotone(instance_id: str, rng: random.Random, dimension: int) -> Instance:
    terms = rng.sample(MONOTONE_TERMS, rng.randint(6, 8))
    n_cands = rng.randint(8, 12)
    size = rng.randint(24, 36)
    budget = rng.randint(2, 4) * size
    filler = MONOTONE_FILLER

    n_covering = min(rng.randint(4, 6), len(terms), n_cands - 2)
    assignment: list[list[str]] = [[] for _ in range(n_covering)]
    for i, term in enumerate(terms):
        assignment[i % n_covering].append(term)

    chunks = []
    for j in range(n_cands):
        if j < n_covering:
            own = assignment[j]
            copies = max(2, int(0.6 * size) // max(1, len(own)))
            tokens = _repeat_terms(rng, own, copies)
        else:
            tokens = []
        chunks.append(_chunk(instance_id, j, _fill_tokens(rng, tokens, filler, size), dimension))

    query_tokens = list(terms)
    rng.shuffle(query_tokens)
    query_tokens += [rng.choice(filler), rng.choice(filler)]
    query = make_query(f"{instance_id}.q", " ".join(query_tokens), terms, dimension)
    return Instance(instance_id, "monotone", query, tuple(chunks), budget, "additive")


def _make_redundant(instance_id: str, rng: random.Random, dimension: int) -> Instance:
    trap = rng.random() < 0.4
    size = rng.randint(26, 32)
    filler = REDUNDANT_FILLER

    if trap:
        # Decoy chunks cover the large core group and score best alone, but
        # the optimum is the three bridge chunks, which jointly cover
        # everything with zero overlap and exclude every decoy. The budget
        # admits exactly three chunks, so a search that commits to a decoy
        # first can never reach the optimum in that subtree.
        budget = 3 * size
        terms = rng.sample(REDUNDANT_TERMS, 9)
        core, extra = terms[:6], terms[6:]
        n_decoys = rng.randint(2, 4)
        groups = [core[0:2] + [extra[0]], core[2:4] + [extra[1]], core[4:6] + [extra[2]]]
        chunks = []
        idx = 0
        for _ in range(n_decoys):
            tokens = _repeat_terms(rng, list(core), 3)
            chunks.append(_chunk(instance_id, idx, _fill_tokens(rng, tokens, filler, size), dimension))
            idx += 1
        for group in groups:
            tokens = _repeat_terms(rng, group, 3)
            chunks.append(_chunk(instance_id, idx, _fill_tokens(rng, tokens, filler, size), dimension))
            idx += 1
    else:
        # Near-duplicates all covering the core; two complementary chunks
        # carry the rest. One duplicate plus both complements is optimal
        # and sits a full chunk below the budget.
        budget = 4 * size
        terms = rng.sample(REDUNDANT_TERMS, rng.randint(8, 10))
        n_core = round(len(terms) * 0.5)
        core = terms[:n_core]
        rest = terms[n_core:]
        half = len(rest) // 2
        comp_groups = [rest[:half], rest[half:]]
        n_dups = rng.randint(3, 5)
        chunks = []
        idx = 0
        for _ in range(n_dups):
            tokens = _repeat_terms(rng, list(core), 3)
            chunks.append(_chunk(instance_id, idx, _fill_tokens(rng, tokens, filler, size), dimension))
            idx += 1
        for group in comp_groups:
            tokens = _repeat_terms(rng, list(group), 3)
            chunks.append(_chunk(instance_id, idx, _fill_tokens(rng, tokens, filler, size), dimension))
            idx += 1

    n_cands = rng.randint(max(8, len(chunks) + 1), 12)
    while len(chunks) < n_cands:
        chunks.append(
            _chunk(instance_id, len(chunks), _fill_tokens(rng, [], filler, size), dimension)
        )

    query_tokens = list(terms)
    rng.shuffle(query_tokens)
    query_tokens += [rng.choice(filler)]
    query = make_query(f"{instance_id}.q", " ".join(query_tokens), terms, dimension)
    return Instance(instance_id, "redundant", query, tuple(chunks), budget, "coverage")


def _make_ordered(instance_id: str, rng: random.Random, dimension: int) -> Instance:
    terms = rng.sample(ORDERED_TERMS, rng.randint(6, 9))
    size = rng.randint(24, 34)
    budget = 3 * size
    filler = ORDERED_FILLER

    n_primary = max(3, round(len(terms) * 0.5))
    primary = terms[:n_primary]
    rest = terms[n_primary:]
    n_secondary = 2 if len(rest) <= 3 else 3
    secondary_groups: list[list[str]] = [[] for _ in range(n_secondary)]
    for i, term in enumerate(rest):
        secondary_groups[i % n_secondary].append(term)
    # The first secondary repeats a couple of primary terms so combinations
    # that include it carry a redundancy penalty under the coverage scorer.
    secondary_groups[0] = secondary_groups[0] + primary[:2]

    chunks = [
        _chunk(
            instance_id, 0,
            _fill_tokens(rng, _repeat_terms(rng, list(primary), 3), filler, size),
            dimension,
        )
    ]
    for j, group in enumerate(secondary_groups, start=1):
        tokens = _repeat_terms(rng, list(group), 3)
        chunks.append(_chunk(instance_id, j, _fill_tokens(rng, tokens, filler, size), dimension))

    n_cands = rng.randint(8, 12)
    while len(chunks) < n_cands:
        chunks.append(
            _chunk(instance_id, len(chunks), _fill_tokens(rng, [], filler, size), dimension)
        )

    query_tokens = list(terms)
    rng.shuffle(query_tokens)
    query_tokens += [rng.choice(filler)]
    query = make_query(f"{instance_id}.q", " ".join(query_tokens), terms, dimension)
    return Instance(instance_id, "ordered", query, tuple(chunks), budget, "order")


_MAKERS = {
    "monotone": _make_monotone,
    "redundant": _make_redundant,
    "ordered": _make_ordered,
}


def generate_instances(
    seed: int,
    count_per_family: int,
    families: tuple[str, ...] = FAMILIES,
    dimension: int = DEFAULT_DIMENSION,
) -> list[Instance]:
    """Generate count_per_family instances for each requested family."""
    unknown = set(families) - set(FAMILIES)
    if unknown:
        raise ValueError(f"unknown families: {sorted(unknown)}")
    instances = []
    for family in families:
        maker = _MAKERS[family]
        for i in range(count_per_family):
            rng = _instance_rng(seed, family, i)
            instances.append(maker(f"{family}-{i:04d}", rng, dimension))
    return instances


def write_instances(instances: list[Instance], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_json(), separators=(",", ":")) + "\n")


def read_instances(path: str, dimension: int = DEFAULT_DIMENSION) -> list[Instance]:
    instances = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                instances.append(Instance.from_json(json.loads(line), dimension))
    return instances
