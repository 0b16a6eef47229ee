"""Phrase embedding, cosine similarity, and the frequent-n-gram stoplist.

The default provider is a deterministic local embedder so the whole engine
runs with no model download and no network.  A remote provider (see the
embedding sidecar service) and a file cache can be layered in when
pretrained sentence embeddings are wanted.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .model import normalize_phrase


class EmbeddingBackend(Enum):
    DETERMINISTIC_LOCAL = "deterministic_local"
    REMOTE_SERVICE = "remote_service"
    FILE_CACHE = "file_cache"


class EmbeddingUnavailableError(RuntimeError):
    """No way to produce a vector for a phrase (no provider, no cache entry)."""


class HashedNgramEmbedder:
    """Deterministic hashed character-trigram embedder.

    Scheme (documented so it can be reimplemented independently):

    * the normalized phrase is padded with one space on each side;
    * every character trigram is hashed with BLAKE2b (digest_size=8,
      key=seed) and read as a big-endian unsigned integer ``v``;
    * the trigram contributes ``+1`` or ``-1`` (sign from ``v & 1``) to
      coordinate ``(v >> 1) % dimension``;
    * the accumulated vector is L2-normalized.

    Purely a function of the input text; no model, no randomness.
    """

    backend = EmbeddingBackend.DETERMINISTIC_LOCAL

    def __init__(self, dimension: int = 256, seed: bytes = b"relmap-v1"):
        if dimension < 2:
            raise ValueError("dimension must be at least 2")
        self.id = f"hashed-trigram-{dimension}"
        self.dimension = dimension
        self._seed = seed
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("cannot embed an empty phrase")
        with self._lock:
            hit = self._cache.get(text)
        if hit is not None:
            return hit
        padded = f" {text} "
        vec = np.zeros(self.dimension)
        for i in range(len(padded) - 2):
            tri = padded[i:i + 3]
            digest = hashlib.blake2b(tri.encode("utf-8"), digest_size=8,
                                     key=self._seed).digest()
            v = int.from_bytes(digest, "big")
            sign = 1.0 if v & 1 == 0 else -1.0
            vec[(v >> 1) % self.dimension] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        vec = vec / norm
        vec.flags.writeable = False
        with self._lock:
            self._cache[text] = vec
        return vec


class RemoteEmbeddingProvider:
    """Client for the embedding sidecar's POST /embed endpoint."""

    backend = EmbeddingBackend.REMOTE_SERVICE

    def __init__(self, endpoint: str, timeout: float = 30.0,
                 session=None):
        import requests

        self._endpoint = endpoint.rstrip("/")
        self._timeout = timeout
        self._session = session or requests.Session()
        health = self._session.get(f"{self._endpoint}/health",
                                   timeout=self._timeout)
        health.raise_for_status()
        meta = health.json()
        self.id = f"remote:{meta['model']}"
        self.dimension = int(meta["dim"])

    def embed(self, text: str) -> np.ndarray:
        resp = self._session.post(f"{self._endpoint}/embed",
                                  json={"texts": [text]},
                                  timeout=self._timeout)
        resp.raise_for_status()
        vec = np.asarray(resp.json()["vectors"][0], dtype=float)
        vec.flags.writeable = False
        return vec


class FileCachedProvider:
    """Embedding cache persisted as line-delimited JSON next to snapshots.

    Reads fall back to the inner provider on a miss and the result is
    appended to the cache file.  With ``inner=None`` the cache is the only
    source and a miss is an EmbeddingUnavailableError, which lets cached
    runs replay with the remote service down.
    """

    backend = EmbeddingBackend.FILE_CACHE

    def __init__(self, path: str | Path, inner=None,
                 provider_id: Optional[str] = None,
                 dimension: Optional[int] = None):
        self._path = Path(path)
        self._inner = inner
        self.id = provider_id or (inner.id if inner else None)
        if self.id is None:
            raise ValueError("provider_id is required when inner is None")
        self.dimension = dimension or (inner.dimension if inner else None)
        self._lock = threading.Lock()
        self._cache: dict[str, np.ndarray] = {}
        if self._path.exists():
            with self._path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    if rec.get("provider") != self.id:
                        continue
                    vec = np.asarray(rec["vector"], dtype=float)
                    vec.flags.writeable = False
                    self._cache[rec["text"]] = vec
                    if self.dimension is None:
                        self.dimension = len(vec)

    def embed(self, text: str) -> np.ndarray:
        with self._lock:
            hit = self._cache.get(text)
        if hit is not None:
            return hit
        if self._inner is None:
            raise EmbeddingUnavailableError(
                f"no cached embedding for {text!r} and no live provider")
        vec = self._inner.embed(text)
        with self._lock:
            self._cache[text] = vec
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps({"provider": self.id, "text": text,
                                     "vector": [float(x) for x in vec]}) + "\n")
        return vec


DEFAULT_STOPLIST_PATH = Path(__file__).parent / "data" / "stoplist.txt"


class Stoplist:
    """Top-frequent corpus n-grams whose phrase similarity is forced to zero."""

    def __init__(self, ngrams: Iterable[str] = ()):
        self.ngrams = frozenset(normalize_phrase(g) for g in ngrams) - {""}

    @classmethod
    def from_file(cls, path: str | Path) -> "Stoplist":
        with Path(path).open(encoding="utf-8") as fh:
            return cls(line.strip() for line in fh if line.strip())

    @classmethod
    def default(cls) -> "Stoplist":
        return cls.from_file(DEFAULT_STOPLIST_PATH)

    def __contains__(self, phrase: str) -> bool:
        return normalize_phrase(phrase) in self.ngrams

    def __len__(self):
        return len(self.ngrams)


def default_provider() -> HashedNgramEmbedder:
    return HashedNgramEmbedder()


def provider_from_env() -> object:
    """Remote provider if RELMAP_EMBED_ENDPOINT is set, else the local one."""
    endpoint = os.environ.get("RELMAP_EMBED_ENDPOINT")
    if endpoint:
        return RemoteEmbeddingProvider(endpoint)
    return default_provider()


def phrase_similarity(a: str, b: str, provider, stoplist: Optional[Stoplist],
                      threshold: float) -> float:
    """Thresholded, stoplist-aware cosine similarity of two phrases in [0, 1].

    Stoplisted phrases score zero against everything; negative cosines clamp
    to zero (similarity must stay nonnegative); values under the threshold
    are dropped to zero before any downstream aggregation.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    na, nb = normalize_phrase(a), normalize_phrase(b)
    if not na or not nb:
        return 0.0
    if stoplist is not None and (na in stoplist or nb in stoplist):
        return 0.0
    if na == nb:
        return 1.0
    cos = float(np.dot(provider.embed(na), provider.embed(nb)))
    cos = min(max(cos, 0.0), 1.0)
    return cos if cos >= threshold else 0.0
