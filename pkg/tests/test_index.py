import numpy as np
import pytest

from asksci.domain import Embedding
from asksci.errors import (
    ChecksumMismatch,
    DimMismatch,
    DuplicateId,
    EmptyIndex,
    IoFailure,
    VersionUnsupported,
)
from asksci.index import IndexEntry, build_index, load_index, save_index


def unit_rows(rng, n, dim):
    m = rng.standard_normal((n, dim))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return m.astype(np.float32)


def make_entries(rng, n, dim=32, kind="AnswerChunk", duplicate_every=0):
    """Random unit-vector entries; optionally copy every duplicate_every-th vector."""
    rows = unit_rows(rng, n, dim)
    if duplicate_every:
        for i in range(duplicate_every, n, duplicate_every):
            rows[i] = rows[i - duplicate_every]
    return [
        IndexEntry(
            entry_id=f"e{i:05d}",
            vector=Embedding(dim=dim, values=rows[i], model_id="m"),
            payload_kind=kind,
        )
        for i in range(n)
    ]


def brute_force_search(ids, matrix, query, k, threshold):
    """Independent oracle: full scan, sort by (score desc, id asc), filter, cut."""
    scored = []
    for i, entry_id in enumerate(ids):
        score = float(np.dot(matrix[i].astype(np.float64), query))
        if score >= threshold:
            scored.append((entry_id, score))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def test_build_rejects_empty():
    with pytest.raises(EmptyIndex):
        build_index([])


def test_build_rejects_duplicate_ids():
    rng = np.random.default_rng(0)
    entries = make_entries(rng, 2)
    entries[1] = IndexEntry(entry_id=entries[0].entry_id, vector=entries[1].vector, payload_kind="AnswerChunk")
    with pytest.raises(DuplicateId):
        build_index(entries)


def test_build_rejects_mixed_dims():
    rng = np.random.default_rng(0)
    entries = make_entries(rng, 2, dim=16) + make_entries(rng, 1, dim=32)
    with pytest.raises(DimMismatch):
        build_index(entries)


def test_build_counts_ten_thousand_entries():
    rng = np.random.default_rng(1)
    index = build_index(make_entries(rng, 10_000, dim=16))
    assert index.entry_count == 10_000


def test_self_retrieval():
    rng = np.random.default_rng(2)
    entries = make_entries(rng, 50)
    index = build_index(entries)
    query = entries[17].vector
    results = index.search(query, k=1, threshold=0.0)
    assert results[0][0] == "e00017"
    assert results[0][1] == pytest.approx(1.0, abs=1e-6)


def test_zero_query_is_empty_above_zero_threshold():
    rng = np.random.default_rng(3)
    index = build_index(make_entries(rng, 20))
    zero = Embedding(dim=32, values=np.zeros(32, dtype=np.float32), model_id="m")
    assert index.search(zero, k=5, threshold=0.01) == []
    # at threshold 0 the contract is score >= threshold, so zeros are returned
    assert len(index.search(zero, k=5, threshold=0.0)) == 5


def test_query_dim_mismatch():
    rng = np.random.default_rng(4)
    index = build_index(make_entries(rng, 5, dim=16))
    q = Embedding(dim=32, values=unit_rows(rng, 1, 32)[0], model_id="m")
    with pytest.raises(DimMismatch):
        index.search(q, k=1, threshold=0.0)


def test_search_matches_brute_force_oracle_with_ties():
    """Random 500-entry index, 100 random queries: exact match including tie order."""
    rng = np.random.default_rng(5)
    entries = make_entries(rng, 500, dim=32, duplicate_every=7)
    index = build_index(entries)
    ids = [e.entry_id for e in entries]
    matrix = np.stack([e.vector.values for e in entries])
    for t in range(100):
        q = unit_rows(rng, 1, 32)[0].astype(np.float64)
        threshold = float(rng.uniform(-0.2, 0.4))
        k = int(rng.integers(1, 12))
        emb = Embedding(dim=32, values=q.astype(np.float32), model_id="m")
        got = index.search(emb, k=k, threshold=threshold)
        want = brute_force_search(ids, matrix, emb.values.astype(np.float64), k, threshold)
        assert [g[0] for g in got] == [w[0] for w in want], f"query {t}"
        np.testing.assert_allclose([g[1] for g in got], [w[1] for w in want], atol=1e-9, rtol=0)


def test_duplicate_vectors_tie_break_by_ascending_id():
    rng = np.random.default_rng(6)
    row = unit_rows(rng, 1, 16)[0]
    entries = [
        IndexEntry(entry_id=eid, vector=Embedding(dim=16, values=row, model_id="m"), payload_kind="AnswerChunk")
        for eid in ("zz", "aa", "mm")
    ]
    index = build_index(entries)
    q = Embedding(dim=16, values=row, model_id="m")
    assert [r[0] for r in index.search(q, k=3, threshold=0.5)] == ["aa", "mm", "zz"]


def test_monotonicity_in_threshold_and_k():
    rng = np.random.default_rng(7)
    index = build_index(make_entries(rng, 200, dim=16))
    q = Embedding(dim=16, values=unit_rows(rng, 1, 16)[0], model_id="m")
    loose = index.search(q, k=50, threshold=-1.0)
    tight = index.search(q, k=50, threshold=0.1)
    assert set(tight).issubset(set(loose))
    scores = [s for _, s in loose]
    assert scores == sorted(scores, reverse=True)
    assert all(s >= 0.1 for _, s in tight)
    # increasing k never reorders the existing prefix
    assert index.search(q, k=5, threshold=-1.0) == loose[:5]


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(8)
    entries = make_entries(rng, 100, dim=24)
    index = build_index(entries)
    path = str(tmp_path / "answers.idx")
    manifest = save_index(index, path)
    assert manifest.entry_count == 100
    assert manifest.dim == 24
    assert manifest.format_version == 1
    assert len(manifest.checksum) == 16

    loaded = load_index(path)
    assert loaded.ids == index.ids
    assert loaded.model_id == index.model_id
    assert loaded.payload_kind == index.payload_kind
    for _ in range(20):
        q = Embedding(dim=24, values=unit_rows(rng, 1, 24)[0], model_id="m")
        a = index.search(q, k=7, threshold=-1.0)
        b = loaded.search(q, k=7, threshold=-1.0)
        assert a == b  # bit-identical scores after round trip


def test_single_byte_corruption_detected(tmp_path):
    rng = np.random.default_rng(9)
    index = build_index(make_entries(rng, 30, dim=8))
    path = str(tmp_path / "x.idx")
    save_index(index, path)
    blob = bytearray(open(path, "rb").read())
    # corrupt a header byte, an id byte, and a matrix byte
    for pos in (5, 40, len(blob) - 100, len(blob) - 1):
        corrupted = bytearray(blob)
        corrupted[pos] ^= 0x01
        bad = tmp_path / f"bad{pos}.idx"
        bad.write_bytes(corrupted)
        with pytest.raises(ChecksumMismatch):
            load_index(str(bad))


def test_unsupported_version_rejected(tmp_path):
    rng = np.random.default_rng(10)
    index = build_index(make_entries(rng, 5, dim=8))
    path = str(tmp_path / "v.idx")
    save_index(index, path)
    blob = open(path, "rb").read()
    blob = blob.replace(b"format_version: 1\n", b"format_version: 2\n")
    # re-stamp the checksum so only the version differs
    import hashlib

    at = blob.find(b"\nchecksum: ") + len(b"\nchecksum: ")
    zeroed = blob[:at] + b"0" * 16 + blob[at + 16:]
    digest = hashlib.blake2b(zeroed, digest_size=8).hexdigest().encode()
    blob = blob[:at] + digest + blob[at + 16:]
    bad = tmp_path / "v2.idx"
    bad.write_bytes(blob)
    with pytest.raises(VersionUnsupported):
        load_index(str(bad))


def test_load_missing_file_raises_io_failure(tmp_path):
    with pytest.raises(IoFailure):
        load_index(str(tmp_path / "nope.idx"))


def test_garbage_file_rejected(tmp_path):
    bad = tmp_path / "garbage.idx"
    bad.write_bytes(b"this is not an index at all")
    with pytest.raises((ChecksumMismatch, IoFailure)):
        load_index(str(bad))
