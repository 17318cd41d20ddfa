"""Immutable flat vector index: exact top-k cosine retrieval plus persistence.

Search is an exact full scan (no approximation): scores are float64 dot
products of unit vectors, results sorted by score descending with ties
broken by ascending entry id.

On-disk format (format_version 1): a fixed-order text header terminated by
a blank line, then one entry id per line, then the row-major little-endian
float32 matrix. The checksum field is a 64-bit blake2b digest over the whole
file with the checksum value bytes zeroed, so a flip of any byte is caught.
"""

from __future__ import annotations

import hashlib
import os
import sys
from dataclasses import dataclass

import numpy as np

from asksci import _scan
from asksci.domain import Embedding
from asksci.errors import (
    ChecksumMismatch,
    DimMismatch,
    DuplicateId,
    EmptyIndex,
    IoFailure,
    VersionUnsupported,
)

FORMAT_VERSION = 1
MAGIC = b"ASKSCI-INDEX\n"
PAYLOAD_KINDS = ("AnswerChunk", "ExamQuestion")

_CHECKSUM_KEY = b"\nchecksum: "
_CHECKSUM_PLACEHOLDER = b"0" * 16


@dataclass(frozen=True)
class IndexEntry:
    entry_id: str
    vector: Embedding
    payload_kind: str


@dataclass(frozen=True)
class IndexManifest:
    dim: int
    model_id: str
    entry_count: int
    payload_kind: str
    checksum: str
    format_version: int


def _content_hash(data: bytes) -> str:
    return hashlib.blake2b(data, digest_size=8).hexdigest()


class VectorIndex:
    """Search-ready index over unit vectors; immutable after build."""

    def __init__(self, ids: list[str], matrix: np.ndarray, model_id: str, payload_kind: str):
        self.ids = list(ids)
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        self.matrix.setflags(write=False)
        self.model_id = model_id
        self.payload_kind = payload_kind
        # rank of each row in ascending-id order, for deterministic tie-breaks
        order = sorted(range(len(self.ids)), key=self.ids.__getitem__)
        rank = np.empty(len(order), dtype=np.int64)
        rank[order] = np.arange(len(order))
        self._id_rank = rank

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def entry_count(self) -> int:
        return int(self.matrix.shape[0])

    def search(self, query: Embedding, k: int, threshold: float) -> list[tuple[str, float]]:
        """Up to k entries with cosine >= threshold, score desc, ties by id asc."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if not -1.0 <= threshold <= 1.0:
            raise ValueError(f"threshold {threshold} outside [-1, 1]")
        qvals = query.values if isinstance(query, Embedding) else np.asarray(query)
        if qvals.shape != (self.dim,):
            raise DimMismatch(f"query dim {qvals.shape} does not match index dim {self.dim}")
        scores = _scan.dot_scores(self.matrix, qvals.astype(np.float64))
        keep = np.flatnonzero(scores >= threshold)
        if keep.size == 0:
            return []
        order = np.lexsort((self._id_rank[keep], -scores[keep]))
        top = keep[order[:k]]
        return [(self.ids[i], float(scores[i])) for i in top]


def build_index(entries: list[IndexEntry]) -> VectorIndex:
    """Build a search-ready index; rejects empty input, mixed dims/kinds, duplicate ids."""
    if not entries:
        raise EmptyIndex("cannot build an index from zero entries")
    dim = entries[0].vector.dim
    kind = entries[0].payload_kind
    model_id = entries[0].vector.model_id
    if kind not in PAYLOAD_KINDS:
        raise ValueError(f"unknown payload_kind {kind!r}")
    seen = set()
    for e in entries:
        if e.vector.dim != dim:
            raise DimMismatch(f"entry {e.entry_id} has dim {e.vector.dim}, index dim {dim}")
        if e.payload_kind != kind:
            raise ValueError(f"entry {e.entry_id} has payload_kind {e.payload_kind}, index kind {kind}")
        if e.entry_id in seen:
            raise DuplicateId(f"duplicate entry id {e.entry_id!r}")
        if "\n" in e.entry_id or not e.entry_id:
            raise ValueError(f"entry id {e.entry_id!r} empty or contains newline")
        seen.add(e.entry_id)
    matrix = np.stack([e.vector.values for e in entries])
    return VectorIndex([e.entry_id for e in entries], matrix, model_id, kind)


def _serialize(index: VectorIndex, checksum: bytes) -> bytes:
    header = (
        MAGIC
        + f"format_version: {FORMAT_VERSION}\n".encode()
        + f"dim: {index.dim}\n".encode()
        + f"model_id: {index.model_id}\n".encode()
        + f"entry_count: {index.entry_count}\n".encode()
        + f"payload_kind: {index.payload_kind}\n".encode()
        + b"checksum: " + checksum + b"\n"
        + b"\n"
    )
    id_table = "".join(i + "\n" for i in index.ids).encode("utf-8")
    body = np.ascontiguousarray(index.matrix, dtype="<f4").tobytes()
    return header + id_table + body


def save_index(index: VectorIndex, path: str) -> IndexManifest:
    """Write the index atomically; returns the manifest including the checksum."""
    if "\n" in index.model_id:
        raise ValueError("model_id must not contain newlines")
    blob = _serialize(index, _CHECKSUM_PLACEHOLDER)
    checksum = _content_hash(blob)
    blob = _serialize(index, checksum.encode("ascii"))
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "wb") as f:
            f.write(blob)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write index to {path}: {exc}") from exc
    return IndexManifest(
        dim=index.dim,
        model_id=index.model_id,
        entry_count=index.entry_count,
        payload_kind=index.payload_kind,
        checksum=checksum,
        format_version=FORMAT_VERSION,
    )


def _parse_header(data: bytes) -> tuple[dict, int]:
    if not data.startswith(MAGIC):
        raise IoFailure("not an index file (bad magic)")
    end = data.find(b"\n\n", len(MAGIC))
    if end < 0:
        raise IoFailure("truncated index header")
    fields = {}
    for line in data[len(MAGIC):end].split(b"\n"):
        key, _, value = line.partition(b": ")
        fields[key.decode("ascii", "replace")] = value.decode("utf-8", "replace")
    return fields, end + 2


def load_index(path: str) -> VectorIndex:
    """Load a saved index; any byte-level corruption fails the checksum."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as exc:
        raise IoFailure(f"cannot read index from {path}: {exc}") from exc

    # verify integrity before trusting any header field
    key_at = data.find(_CHECKSUM_KEY, 0, 4096)
    if key_at < 0:
        raise ChecksumMismatch("checksum field missing or corrupt")
    value_at = key_at + len(_CHECKSUM_KEY)
    stored = data[value_at:value_at + 16]
    zeroed = data[:value_at] + _CHECKSUM_PLACEHOLDER + data[value_at + 16:]
    if _content_hash(zeroed).encode("ascii") != stored:
        raise ChecksumMismatch(f"index file {path} failed checksum validation")

    fields, offset = _parse_header(data)
    try:
        version = int(fields["format_version"])
    except (KeyError, ValueError):
        raise IoFailure("index header missing format_version") from None
    if version != FORMAT_VERSION:
        raise VersionUnsupported(f"index format_version {version} not supported (expected {FORMAT_VERSION})")
    try:
        dim = int(fields["dim"])
        count = int(fields["entry_count"])
        model_id = fields["model_id"]
        payload_kind = fields["payload_kind"]
    except (KeyError, ValueError) as exc:
        raise IoFailure(f"index header malformed: {exc}") from None
    if payload_kind not in PAYLOAD_KINDS:
        raise IoFailure(f"unknown payload_kind {payload_kind!r}")

    ids = []
    pos = offset
    for _ in range(count):
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise IoFailure("index id table truncated")
        ids.append(data[pos:nl].decode("utf-8"))
        pos = nl + 1
    expected = count * dim * 4
    if len(data) - pos != expected:
        raise IoFailure(f"index matrix has {len(data) - pos} bytes, expected {expected}")
    matrix = np.frombuffer(data[pos:], dtype="<f4").reshape(count, dim)
    if sys.byteorder != "little":
        matrix = matrix.astype(np.float32)
    return VectorIndex(ids, matrix, model_id, payload_kind)
