"""Text embedders behind one interface.

The hashed bag-of-words embedder is the test and offline default: fully
deterministic, no model downloads.  ``RemoteEmbedder`` talks to an external
embedding endpoint when one is configured.
"""

from __future__ import annotations

import hashlib
import os
import re
from typing import Protocol

import httpx
import numpy as np

_WORD = re.compile(r"[a-z0-9_]+")

EMBED_ENDPOINT_ENV = "STFORGE_EMBED_ENDPOINT"
EMBED_MODEL_ENV = "STFORGE_EMBED_MODEL"
EMBED_TOKEN_ENV = "STFORGE_EMBED_TOKEN"


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashedBagEmbedder:
    """Hashed bag-of-words into ``dimension`` buckets, L2-normalized.

    The bucket of a word is derived from its MD5 digest, so vectors are
    bit-identical across processes and platforms.
    """

    def __init__(self, dimension: int = 256) -> None:
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        vector = np.zeros(self.dimension, dtype=np.float64)
        for word in _WORD.findall(text.lower()):
            digest = hashlib.md5(word.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:8], "big") % self.dimension
            vector[bucket] += 1.0
        norm = float(np.linalg.norm(vector))
        if norm > 0.0:
            vector /= norm
        return vector


class RemoteEmbedder:
    """Embeddings endpoint client (``/v1/embeddings`` request shape)."""

    def __init__(self, endpoint: str, model: str, dimension: int, *,
                 token: str | None = None, client: httpx.Client | None = None,
                 timeout_s: float = 30.0) -> None:
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.dimension = dimension
        self._token = token
        self._client = client or httpx.Client()
        self._timeout_s = timeout_s

    @staticmethod
    def from_env(dimension: int = 3072) -> "RemoteEmbedder":
        endpoint = os.environ.get(EMBED_ENDPOINT_ENV)
        if not endpoint:
            raise RuntimeError(f"{EMBED_ENDPOINT_ENV} is not set")
        return RemoteEmbedder(
            endpoint=endpoint,
            model=os.environ.get(EMBED_MODEL_ENV, "text-embedding-3-large"),
            dimension=dimension,
            token=os.environ.get(EMBED_TOKEN_ENV),
        )

    def embed(self, text: str) -> np.ndarray:
        headers = {}
        if self._token:
            headers["Authorization"] = f"Bearer {self._token}"
        response = self._client.post(
            f"{self.endpoint}/v1/embeddings",
            json={"model": self.model, "input": text},
            headers=headers,
            timeout=self._timeout_s,
        )
        response.raise_for_status()
        payload = response.json()
        vector = np.asarray(payload["data"][0]["embedding"], dtype=np.float64)
        if vector.shape != (self.dimension,):
            raise ValueError(
                f"embedding dimension {vector.shape} does not match configured {self.dimension}"
            )
        norm = float(np.linalg.norm(vector))
        return vector / norm if norm > 0.0 else vector
