"""Embedding providers behind one interface.

The reference provider is a deterministic signed-hash bag-of-words encoder:
lowercase, split on non-alphanumeric, 64-bit FNV-1a per token, bucket =
hash mod dim, sign from bit 32, accumulate, L2-normalize. It stands in for
a real sentence encoder so indexes and tests are fully reproducible.

The remote provider posts {"texts": [...]} to an HTTP endpoint returning
{"model_id", "dim", "vectors"} and normalizes what comes back.
"""

from __future__ import annotations

import os
import re
import threading
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import requests

from asksci.domain import Embedding
from asksci.errors import DimensionMismatch, RemoteUnavailable

DEFAULT_DIM = 256
DEFAULT_TIMEOUT_MS = 2000
DEFAULT_MAX_INFLIGHT = 8

ENV_ENDPOINT = "EMBED_ENDPOINT"
ENV_TIMEOUT_MS = "EMBED_TIMEOUT_MS"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

# maximal alphanumeric runs (underscore excluded)
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class EmbedderConfig:
    provider: str = "reference"
    dim: int = DEFAULT_DIM
    model_id: str = ""
    remote_endpoint: Optional[str] = None
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    def __post_init__(self):
        if self.provider not in ("reference", "remote"):
            raise ValueError(f"unknown provider {self.provider!r}")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.timeout_ms < 1:
            raise ValueError("timeout_ms must be positive")
        if (self.provider == "remote") != (self.remote_endpoint is not None):
            raise ValueError("remote_endpoint must be set iff provider is 'remote'")
        if not self.model_id:
            default = f"ref-fnv1a-{self.dim}" if self.provider == "reference" else "remote"
            object.__setattr__(self, "model_id", default)


def apply_env_overrides(config: EmbedderConfig, env=os.environ) -> EmbedderConfig:
    """EMBED_ENDPOINT / EMBED_TIMEOUT_MS override the configured values."""
    endpoint = env.get(ENV_ENDPOINT)
    timeout = env.get(ENV_TIMEOUT_MS)
    if endpoint:
        config = replace(config, provider="remote", remote_endpoint=endpoint)
    if timeout:
        config = replace(config, timeout_ms=int(timeout))
    return config


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class ReferenceEmbedder:
    """Deterministic signed-hash bag-of-words embedder."""

    def __init__(self, config: EmbedderConfig):
        self.config = config
        self.model_id = config.model_id

    def embed(self, text: str) -> Embedding:
        dim = self.config.dim
        tokens = tokenize(text)
        if not tokens:
            return Embedding(dim=dim, values=np.zeros(dim, dtype=np.float32), model_id=self.model_id)
        acc = np.zeros(dim, dtype=np.float64)
        salt = b""
        while True:
            for tok in tokens:
                h = fnv1a64(tok.encode("utf-8") + salt)
                sign = 1.0 if (h >> 32) & 1 == 0 else -1.0
                acc[h % dim] += sign
            if acc.any():
                break
            # all buckets cancelled (opposite signs colliding); re-hash salted
            # so non-empty token lists always yield a unit vector
            salt += b"\x00"
        values = (acc / np.linalg.norm(acc)).astype(np.float32)
        return Embedding(dim=dim, values=values, model_id=self.model_id)

    def embed_batch(self, texts: list[str]) -> list[Embedding]:
        if not texts:
            raise ValueError("texts must be a non-empty list")
        return [self.embed(t) for t in texts]


class RemoteEmbedder:
    """Client for the remote embedding HTTP contract.

    Concurrent calls are allowed; in-flight requests are capped.
    """

    def __init__(self, config: EmbedderConfig, max_inflight: int = DEFAULT_MAX_INFLIGHT):
        self.config = config
        self.model_id = config.model_id
        self._inflight = threading.BoundedSemaphore(max_inflight)

    def embed(self, text: str) -> Embedding:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: list[str]) -> list[Embedding]:
        if not texts:
            raise ValueError("texts must be a non-empty list")
        dim = self.config.dim
        try:
            with self._inflight:
                resp = requests.post(
                    self.config.remote_endpoint,
                    json={"texts": list(texts)},
                    timeout=self.config.timeout_ms / 1000.0,
                )
            resp.raise_for_status()
            body = resp.json()
        except requests.RequestException as exc:
            raise RemoteUnavailable(f"embedding endpoint failed: {exc}") from exc
        except ValueError as exc:
            raise RemoteUnavailable(f"embedding endpoint returned invalid JSON: {exc}") from exc

        if not isinstance(body, dict) or "vectors" not in body:
            raise RemoteUnavailable("embedding endpoint returned a malformed body")
        if body.get("dim") != dim:
            raise DimensionMismatch(f"endpoint returned dim {body.get('dim')}, expected {dim}")
        vectors = body["vectors"]
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise RemoteUnavailable(
                f"endpoint returned {len(vectors) if isinstance(vectors, list) else '?'} vectors "
                f"for {len(texts)} texts"
            )
        model_id = str(body.get("model_id", self.model_id))

        out = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dim,):
                raise DimensionMismatch(f"endpoint vector has shape {arr.shape}, expected ({dim},)")
            norm = float(np.linalg.norm(arr))
            if norm > 0.0:
                arr = arr / norm
            out.append(Embedding(dim=dim, values=arr.astype(np.float32), model_id=model_id))
        return out


def make_embedder(config: EmbedderConfig):
    if config.provider == "remote":
        return RemoteEmbedder(config)
    return ReferenceEmbedder(config)
