"""In-memory vector store: exact cosine top-n over chunk embeddings.

Candidate retrieval is an exact linear scan; at desk scale (<= 1e5 chunks)
this is fast, and exactness keeps oracle tests simple. Embeddings are unit
vectors, so cosine similarity is a dot product.
"""

from __future__ import annotations

import struct
from typing import Iterable

import numpy as np

from .corpus import Chunk, Query
from .errors import StoreError, StoreFormatError

_MAGIC = b"CRGS"
_VERSION = 1


class VectorStore:
    def __init__(self, dimension: int):
        if dimension < 1:
            raise StoreError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self._entries: dict[str, Chunk] = {}
        self._matrix: np.ndarray | None = None  # rebuilt lazily after inserts
        self._ids: list[str] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, chunk_id: str) -> bool:
        return chunk_id in self._entries

    def get(self, chunk_id: str) -> Chunk:
        return self._entries[chunk_id]

    def chunks(self) -> dict[str, Chunk]:
        """Read-only view of id -> chunk, for scorer lookups."""
        return dict(self._entries)

    def insert(self, chunk: Chunk) -> None:
        """Add a chunk. Re-inserting identical content is a no-op; the same
        id with different content is rejected."""
        if chunk.embedding.shape != (self.dimension,):
            raise StoreError(
                f"chunk {chunk.id!r} has dimension {chunk.embedding.shape[0]}, "
                f"store expects {self.dimension}"
            )
        existing = self._entries.get(chunk.id)
        if existing is not None:
            if existing.content_equals(chunk):
                return
            raise StoreError(f"chunk id conflict with different content: {chunk.id!r}")
        self._entries[chunk.id] = chunk
        self._matrix = None

    def insert_many(self, chunks: Iterable[Chunk]) -> None:
        for chunk in chunks:
            self.insert(chunk)

    def _ensure_matrix(self) -> None:
        if self._matrix is None:
            self._ids = sorted(self._entries)
            if self._ids:
                self._matrix = np.stack(
                    [self._entries[i].embedding.astype(np.float64) for i in self._ids]
                )
            else:
                self._matrix = np.zeros((0, self.dimension), dtype=np.float64)

    def top_n(self, query: Query, n: int) -> list[Chunk]:
        """The n stored chunks most similar to the query.

        Sorted by descending cosine similarity, ties by ascending chunk id;
        returns min(n, len(store)) chunks.
        """
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self._ensure_matrix()
        if not self._ids:
            return []
        sims = self._matrix @ query.embedding.astype(np.float64)
        order = sorted(range(len(self._ids)), key=lambda i: (-sims[i], self._ids[i]))
        return [self._entries[self._ids[i]] for i in order[:n]]

    def save(self, path: str) -> None:
        """Write the store to a single file.

        Layout (all integers little-endian): magic "CRGS", version u32,
        dimension u32, count u64, then per chunk (sorted by id): id length
        u32 + UTF-8 id, text length u32 + UTF-8 text, token_count u32, and
        the embedding as `dimension` float32 values.
        """
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<IIQ", _VERSION, self.dimension, len(self._entries)))
            for chunk_id in sorted(self._entries):
                chunk = self._entries[chunk_id]
                id_bytes = chunk.id.encode("utf-8")
                text_bytes = chunk.text.encode("utf-8")
                fh.write(struct.pack("<I", len(id_bytes)))
                fh.write(id_bytes)
                fh.write(struct.pack("<I", len(text_bytes)))
                fh.write(text_bytes)
                fh.write(struct.pack("<I", chunk.token_count))
                fh.write(chunk.embedding.astype("<f4").tobytes())

    @classmethod
    def load(cls, path: str) -> "VectorStore":
        with open(path, "rb") as fh:
            data = fh.read()
        if len(data) < 20 or data[:4] != _MAGIC:
            raise StoreFormatError(f"{path}: not a store file (bad magic)")
        version, dimension, count = struct.unpack_from("<IIQ", data, 4)
        if version != _VERSION:
            raise StoreFormatError(f"{path}: unsupported store version {version}")
        store = cls(dimension)
        offset = 20
        try:
            for _ in range(count):
                (id_len,) = struct.unpack_from("<I", data, offset)
                offset += 4
                chunk_id = data[offset : offset + id_len].decode("utf-8")
                offset += id_len
                (text_len,) = struct.unpack_from("<I", data, offset)
                offset += 4
                text = data[offset : offset + text_len].decode("utf-8")
                offset += text_len
                (token_count,) = struct.unpack_from("<I", data, offset)
                offset += 4
                end = offset + 4 * dimension
                if end > len(data):
                    raise StoreFormatError(f"{path}: truncated record")
                embedding = np.frombuffer(data[offset:end], dtype="<f4").copy()
                offset += 4 * dimension
                store.insert(Chunk(chunk_id, text, token_count, embedding))
        except (struct.error, UnicodeDecodeError) as exc:
            raise StoreFormatError(f"{path}: truncated or corrupt record: {exc}") from exc
        if offset != len(data):
            raise StoreFormatError(f"{path}: trailing bytes after {count} records")
        return store
