import numpy as np
import pytest

from corag import Chunk, VectorStore, make_chunk, make_query
from corag.errors import StoreError, StoreFormatError

DIM = 32


def chunk_of(chunk_id, text):
    from corag import tokenize

    return make_chunk(chunk_id, tokenize(text), DIM)


class TestInsert:
    def test_insert_into_empty(self):
        store = VectorStore(DIM)
        store.insert(chunk_of("c1", "alpha beta"))
        assert len(store) == 1
        assert "c1" in store

    def test_idempotent_reinsert(self):
        store = VectorStore(DIM)
        chunk = chunk_of("c1", "alpha beta")
        store.insert(chunk)
        store.insert(chunk_of("c1", "alpha beta"))
        assert len(store) == 1

    def test_conflicting_content_rejected(self):
        store = VectorStore(DIM)
        store.insert(chunk_of("c1", "alpha beta"))
        with pytest.raises(StoreError, match="conflict"):
            store.insert(chunk_of("c1", "gamma delta"))

    def test_dimension_mismatch_rejected(self):
        store = VectorStore(DIM)
        bad = make_chunk("c1", ["alpha"], DIM * 2)
        with pytest.raises(StoreError, match="dimension"):
            store.insert(bad)

    def test_hundred_distinct(self):
        store = VectorStore(DIM)
        store.insert_many(chunk_of(f"c{i:03d}", f"token{i} text") for i in range(100))
        assert len(store) == 100


class TestTopN:
    def test_single_chunk_store(self):
        store = VectorStore(DIM)
        store.insert(chunk_of("c1", "alpha beta"))
        query = make_query("q", "anything else", None, DIM)
        assert [c.id for c in store.top_n(query, 5)] == ["c1"]

    def test_identical_text_ranks_first(self):
        store = VectorStore(DIM)
        store.insert(chunk_of("same", "paris landmark tour"))
        store.insert(chunk_of("other", "unrelated text entirely"))
        query = make_query("q", "paris landmark tour", None, DIM)
        top = store.top_n(query, 2)
        assert top[0].id == "same"
        sim = float(top[0].embedding.astype(np.float64) @ query.embedding.astype(np.float64))
        assert sim == pytest.approx(1.0, abs=1e-6)

    def test_empty_store(self):
        store = VectorStore(DIM)
        query = make_query("q", "anything", None, DIM)
        assert store.top_n(query, 3) == []

    def test_matches_brute_force(self):
        rng = np.random.RandomState(0)
        store = VectorStore(DIM)
        chunks = []
        for i in range(10):
            words = " ".join(f"w{rng.randint(0, 50)}" for _ in range(8))
            chunk = chunk_of(f"c{i}", words)
            chunks.append(chunk)
            store.insert(chunk)
        query = make_query("q", "w3 w17 w40", None, DIM)

        def brute(n):
            sims = [
                (float(c.embedding.astype(np.float64) @ query.embedding.astype(np.float64)), c.id)
                for c in chunks
            ]
            sims.sort(key=lambda t: (-t[0], t[1]))
            return [cid for _, cid in sims[:n]]

        for n in (1, 3, 10):
            assert [c.id for c in store.top_n(query, n)] == brute(n)

    def test_full_store_is_permutation(self):
        store = VectorStore(DIM)
        ids = {f"c{i}" for i in range(7)}
        for i, cid in enumerate(sorted(ids)):
            store.insert(chunk_of(cid, f"text number {i}"))
        query = make_query("q", "text", None, DIM)
        out = store.top_n(query, len(ids))
        assert {c.id for c in out} == ids

    def test_similarity_non_increasing_and_tie_order(self):
        store = VectorStore(DIM)
        # Identical content under different ids forces exact similarity ties.
        for cid in ("z", "a", "m"):
            store.insert(chunk_of(cid, "tied chunk text"))
        query = make_query("q", "tied chunk text", None, DIM)
        out = store.top_n(query, 3)
        assert [c.id for c in out] == ["a", "m", "z"]


class TestPersistence:
    def test_round_trip(self, tmp_path):
        store = VectorStore(DIM)
        store.insert(chunk_of("c1", "alpha beta gamma"))
        store.insert(chunk_of("c2", "delta: epsilon!"))
        path = str(tmp_path / "store.bin")
        store.save(path)
        loaded = VectorStore.load(path)
        assert len(loaded) == 2
        assert loaded.dimension == DIM
        for cid in ("c1", "c2"):
            assert loaded.get(cid).content_equals(store.get(cid))

    def test_save_is_deterministic(self, tmp_path):
        def build():
            store = VectorStore(DIM)
            store.insert(chunk_of("b", "second text"))
            store.insert(chunk_of("a", "first text"))
            return store

        p1, p2 = str(tmp_path / "s1.bin"), str(tmp_path / "s2.bin")
        build().save(p1)
        build().save(p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_header_magic(self, tmp_path):
        store = VectorStore(DIM)
        store.insert(chunk_of("c1", "alpha"))
        path = str(tmp_path / "store.bin")
        store.save(path)
        data = open(path, "rb").read()
        assert data[:4] == b"CRGS"
        version = int.from_bytes(data[4:8], "little")
        dimension = int.from_bytes(data[8:12], "little")
        count = int.from_bytes(data[12:20], "little")
        assert (version, dimension, count) == (1, DIM, 1)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOPE" + b"\x00" * 30)
        with pytest.raises(StoreFormatError, match="magic"):
            VectorStore.load(str(path))

    def test_truncated_rejected(self, tmp_path):
        store = VectorStore(DIM)
        store.insert(chunk_of("c1", "alpha beta"))
        path = tmp_path / "store.bin"
        store.save(str(path))
        data = path.read_bytes()
        path.write_bytes(data[:-10])
        with pytest.raises(StoreFormatError):
            VectorStore.load(str(path))

    def test_embeddings_survive_as_float32(self, tmp_path):
        store = VectorStore(DIM)
        chunk = chunk_of("c1", "alpha beta gamma")
        store.insert(chunk)
        path = str(tmp_path / "store.bin")
        store.save(path)
        loaded = VectorStore.load(path)
        assert loaded.get("c1").embedding.dtype == np.float32
        assert np.array_equal(loaded.get("c1").embedding, chunk.embedding)
