"""Embedding backends served over HTTP.

Two backends share one tiny interface (``model_id``, ``dimension``,
``encode``).  The pretrained-model backend wraps a sentence-transformers
model and is what production points at; the hashed-trigram backend is a
pure function of the text, needs no download, and keeps the whole test
suite offline.
"""

from __future__ import annotations

import hashlib

import numpy as np

HASHED_PREFIX = "hashed-trigram-"


class BackendError(RuntimeError):
    """The backend cannot produce vectors (load failure, encode failure)."""


class HashedTrigramBackend:
    """Deterministic hashed character-trigram embedder.

    Same documented scheme as the engine's local provider: pad the text
    with one space per side, hash each character trigram with BLAKE2b
    (digest_size=8, key=seed), add +1/-1 (sign from the low bit) to
    coordinate (value >> 1) % dimension, then L2-normalize.
    """

    def __init__(self, dimension: int = 256, seed: bytes = b"relmap-v1"):
        if dimension < 2:
            raise ValueError("dimension must be at least 2")
        self.model_id = f"{HASHED_PREFIX}{dimension}"
        self.dimension = dimension
        self._seed = seed

    def encode(self, texts: list[str]) -> np.ndarray:
        return np.stack([self._one(t) for t in texts])

    def _one(self, text: str) -> np.ndarray:
        padded = f" {text} "
        vec = np.zeros(self.dimension)
        for i in range(len(padded) - 2):
            digest = hashlib.blake2b(padded[i:i + 3].encode("utf-8"),
                                     digest_size=8, key=self._seed).digest()
            v = int.from_bytes(digest, "big")
            vec[(v >> 1) % self.dimension] += 1.0 if v & 1 == 0 else -1.0
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return vec / norm


class SentenceModelBackend:
    """Pretrained sentence-embedding model behind the same interface.

    The model is pinned by name; loading happens in the constructor, so
    the caller decides whether to load eagerly or in a background thread.
    """

    def __init__(self, model_name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise BackendError(f"sentence-transformers not installed: {exc}")
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:  # noqa: BLE001 - any load failure is a 503
            raise BackendError(f"cannot load model {model_name!r}: {exc}")
        self.model_id = model_name
        self.dimension = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> np.ndarray:
        try:
            vectors = self._model.encode(texts, convert_to_numpy=True,
                                         normalize_embeddings=True)
        except Exception as exc:  # noqa: BLE001
            raise BackendError(f"encode failed: {exc}")
        return np.asarray(vectors, dtype=float)


def build_backend(model_name: str):
    """Backend for a model id: hashed-trigram-<dim> is served locally,
    anything else is treated as a pretrained model name."""
    if model_name.startswith(HASHED_PREFIX):
        dimension = int(model_name[len(HASHED_PREFIX):])
        return HashedTrigramBackend(dimension=dimension)
    return SentenceModelBackend(model_name)
