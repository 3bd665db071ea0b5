"""Text embedders behind one interface: a deterministic hashed bag-of-words
embedder for offline use, and a client for an HTTP embedding endpoint."""

from __future__ import annotations

import hashlib
import os
from typing import Protocol, Sequence

import numpy as np

from .feature_model import SynthlineError

EMBED_KEY_ENV = "SYNTHLINE_EMBED_KEY"


class EmbeddingError(SynthlineError):
    pass


class Embedder(Protocol):
    """Maps texts to equal-dimension vectors; deterministic per implementation."""

    name: str

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


class HashEmbedder:
    """Hashed bag-of-words into a fixed dimension, L2-normalized.

    Texts with equal token multisets map to identical vectors (cosine 1.0),
    which makes offline metric tests exact.
    """

    def __init__(self, dimension: int = 256):
        if dimension < 1:
            raise EmbeddingError("dimension must be positive")
        self.dimension = dimension
        self.name = f"hash-bow-{dimension}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        from .metrics import tokenize

        out = np.zeros((len(texts), self.dimension), dtype=np.float64)
        for i, text in enumerate(texts):
            for token in tokenize(text):
                digest = hashlib.sha256(token.encode("utf-8")).digest()
                out[i, int.from_bytes(digest[:8], "big") % self.dimension] += 1.0
        norms = np.linalg.norm(out, axis=1)
        if np.any(norms == 0):
            bad = int(np.argmin(norms))
            raise EmbeddingError(f"text {bad} has no tokens to embed")
        return out / norms[:, None]


class HttpEmbedder:
    """Client for an embeddings endpoint (POST {base}/embeddings with
    ``{"model": ..., "input": [texts]}``, response ``{"data": [{"embedding":
    [...]}, ...]}``). The API key comes from SYNTHLINE_EMBED_KEY unless given."""

    def __init__(
        self,
        base_url: str,
        model: str = "text-embedding-3-small",
        api_key: str | None = None,
        batch_size: int = 128,
        timeout: float = 60.0,
        client=None,
    ):
        import httpx

        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(EMBED_KEY_ENV, "")
        self.batch_size = batch_size
        self.name = f"http:{self.base_url}/{model}"
        self._client = client or httpx.Client(timeout=timeout)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        rows: list[list[float]] = []
        for start in range(0, len(texts), self.batch_size):
            batch = list(texts[start : start + self.batch_size])
            resp = self._client.post(
                f"{self.base_url}/embeddings",
                headers=headers,
                json={"model": self.model, "input": batch},
            )
            if resp.status_code != 200:
                raise EmbeddingError(
                    f"embedding endpoint returned {resp.status_code}: {resp.text[:200]}"
                )
            data = resp.json().get("data", [])
            if len(data) != len(batch):
                raise EmbeddingError(
                    f"endpoint returned {len(data)} vectors for {len(batch)} texts"
                )
            rows.extend(item["embedding"] for item in data)
        matrix = np.asarray(rows, dtype=np.float64)
        if matrix.ndim != 2:
            raise EmbeddingError("endpoint returned vectors of unequal dimension")
        return matrix


def make_embedder(spec: str) -> Embedder:
    """``hash`` (optionally ``hash:<dim>``) or an embedding endpoint URL."""
    if spec == "hash":
        return HashEmbedder()
    if spec.startswith("hash:"):
        return HashEmbedder(int(spec.split(":", 1)[1]))
    if spec.startswith("http://") or spec.startswith("https://"):
        return HttpEmbedder(spec)
    raise EmbeddingError(f"unknown embedder '{spec}' (use 'hash' or an endpoint URL)")
