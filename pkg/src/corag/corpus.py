"""Tokenization, chunking, deterministic embeddings, and corpus ingestion.

Token costs everywhere in this package are counts produced by
:func:`tokenize`; :func:`estimate_cost` is the cheap whitespace proxy used
before a combination is re-verified with the exact tokenizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import IngestError

DEFAULT_DIMENSION = 1024

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF

# token -> (hash,) cache; tokens repeat heavily so this makes corpus-scale
# embedding cheap without changing results (pure function of the token).
_hash_cache: dict[str, int] = {}


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _U64
    return h


def tokenize(text: str) -> list[str]:
    """Split text into lowercase tokens.

    Rules: lowercase the input, split on any Unicode whitespace, then split
    each word into maximal runs of alphanumeric characters and maximal runs
    of punctuation (anything that is neither alphanumeric nor whitespace).
    The same bytes always produce the same tokens.
    """
    tokens: list[str] = []
    for word in text.lower().split():
        run_start = 0
        run_alnum = word[0].isalnum()
        for i in range(1, len(word)):
            is_alnum = word[i].isalnum()
            if is_alnum != run_alnum:
                tokens.append(word[run_start:i])
                run_start = i
                run_alnum = is_alnum
        tokens.append(word[run_start:])
    return tokens


def estimate_cost(text: str) -> int:
    """Whitespace word count: the fast token-cost proxy.

    Never exceeds the exact cost because punctuation splitting only adds
    tokens; callers re-verify final selections with :func:`tokenize`.
    """
    return len(text.split())


def embed(tokens: Sequence[str], dimension: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Feature-hash a token sequence into a unit-norm float32 vector.

    Each token is FNV-1a hashed; the hash picks a bucket (``hash % dimension``)
    and a sign (+1 when bit 63 is clear, otherwise -1). Accumulation happens
    in float64 in token order, then the vector is L2-normalized, so identical
    token sequences give bit-identical vectors on every platform. An empty
    sequence maps to the zero vector.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    vec = np.zeros(dimension, dtype=np.float64)
    for token in tokens:
        h = _hash_cache.get(token)
        if h is None:
            h = fnv1a64(token.encode("utf-8"))
            _hash_cache[token] = h
        sign = 1.0 if (h >> 63) == 0 else -1.0
        vec[h % dimension] += sign
    norm = float(np.sqrt(np.dot(vec, vec)))
    if norm > 0.0:
        vec /= norm
    return vec.astype(np.float32)


@dataclass(frozen=True)
class Chunk:
    """A contiguous block of corpus tokens: the atomic retrieval unit."""

    id: str
    text: str
    token_count: int
    embedding: np.ndarray

    def content_equals(self, other: "Chunk") -> bool:
        return (
            self.id == other.id
            and self.text == other.text
            and self.token_count == other.token_count
            and np.array_equal(self.embedding, other.embedding)
        )


@dataclass(frozen=True)
class Query:
    id: str
    text: str
    embedding: np.ndarray
    relevant_terms: frozenset[str] = field(default_factory=frozenset)


def make_chunk(chunk_id: str, tokens: Sequence[str], dimension: int = DEFAULT_DIMENSION) -> Chunk:
    """Build a chunk from an already-tokenized block."""
    text = " ".join(tokens)
    return Chunk(
        id=chunk_id,
        text=text,
        token_count=len(tokens),
        embedding=embed(tokens, dimension),
    )


def make_query(
    query_id: str,
    text: str,
    relevant_terms: Optional[Iterable[str]] = None,
    dimension: int = DEFAULT_DIMENSION,
) -> Query:
    return Query(
        id=query_id,
        text=text,
        embedding=embed(tokenize(text), dimension),
        relevant_terms=frozenset(relevant_terms) if relevant_terms else frozenset(),
    )


def chunk_corpus(
    documents: Sequence[tuple[str, str]],
    chunk_size: int,
    dimension: int = DEFAULT_DIMENSION,
) -> list[Chunk]:
    """Partition each document's token stream into fixed-size chunks.

    Every chunk holds exactly ``chunk_size`` tokens except a possibly shorter
    final block per document; together the blocks cover the document's token
    sequence. Chunk ids are ``<doc_id>#<index>``.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    seen: set[str] = set()
    chunks: list[Chunk] = []
    for doc_id, text in documents:
        if doc_id in seen:
            raise IngestError(f"duplicate document id: {doc_id!r}")
        seen.add(doc_id)
        tokens = tokenize(text)
        for index, start in enumerate(range(0, len(tokens), chunk_size)):
            block = tokens[start : start + chunk_size]
            chunks.append(make_chunk(f"{doc_id}#{index}", block, dimension))
    return chunks


def load_documents(path: str) -> list[tuple[str, str]]:
    """Read a JSON-lines corpus file: one {"id", "text"} object per line."""
    documents: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise IngestError(f"{path}:{lineno}: expected object with 'id' and 'text'")
            documents.append((str(record["id"]), str(record["text"])))
    if not documents:
        raise IngestError(f"{path}: no documents found")
    return documents


def load_queries(path: str, dimension: int = DEFAULT_DIMENSION) -> list[Query]:
    """Read a JSON-lines query file: {"id", "text", "relevant_terms"?} per line."""
    queries: list[Query] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise IngestError(f"{path}:{lineno}: expected object with 'id' and 'text'")
            terms = record.get("relevant_terms")
            queries.append(
                make_query(str(record["id"]), str(record["text"]), terms, dimension)
            )
    return queries
