"""Deterministic text embeddings and vector math.

The default provider is a signed feature-hashing embedder: word unigrams
plus character trigrams hashed with FNV-1a 64 into a fixed 384-dim space,
L2-normalized. It is deterministic across runs and platforms, which makes
every downstream result reproducible without model weights. Any provider
honoring the same contract (fixed dimension, deterministic, unit-norm
output) can be swapped in.
"""

from __future__ import annotations

import unicodedata

import numpy as np

from .errors import DimensionMismatch, EmptyText

EMBEDDING_DIM = 384

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF

# Word-identity features outweigh order-sensitive trigram features so that
# permutations of the same words stay close in cosine.
_UNIGRAM_WEIGHT = 2.0
_TRIGRAM_WEIGHT = 1.0


def fnv1a_64(data: bytes) -> int:
    """FNV-1a 64-bit hash over raw bytes."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _U64
    return h


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; 0.0 if either vector is all-zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"shapes {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


class HashedFeatureEmbedder:
    """Default provider: signed feature hashing, FNV-1a 64, unit-norm output.

    Pipeline: NFC-normalize, lowercase, split on unicode whitespace; emit
    each word as a unigram feature and every character trigram of the
    space-joined text; each feature lands in bucket ``hash % dim`` with the
    sign taken from the hash's top bit; signed counts are L2-normalized.

    Immutable after construction; safe for concurrent use.
    """

    def __init__(self, dimension: int = EMBEDDING_DIM):
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.name = "hashed-features-fnv1a"
        self.dimension = dimension
        # FNV over short strings is the per-call hot spot; the feature
        # vocabulary is small in practice, so memoize hashes.
        self._hash_cache: dict[str, int] = {}

    def _feature_hash(self, feature: str) -> int:
        h = self._hash_cache.get(feature)
        if h is None:
            h = fnv1a_64(feature.encode("utf-8"))
            if len(self._hash_cache) < 1_000_000:
                self._hash_cache[feature] = h
        return h

    def embed(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise EmptyText("cannot embed empty or whitespace-only text")
        normalized = unicodedata.normalize("NFC", text).lower()
        words = normalized.split()
        weights: dict[str, float] = {}
        for w in words:
            key = "w:" + w
            weights[key] = weights.get(key, 0.0) + _UNIGRAM_WEIGHT
        joined = " ".join(words)
        for i in range(len(joined) - 2):
            key = "c:" + joined[i : i + 3]
            weights[key] = weights.get(key, 0.0) + _TRIGRAM_WEIGHT
        vec = np.zeros(self.dimension, dtype=np.float64)
        for feature, weight in weights.items():
            h = self._feature_hash(feature)
            sign = 1.0 if (h >> 63) == 0 else -1.0
            vec[h % self.dimension] += sign * weight
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)


class SeededRandomEmbedder:
    """Contract-honoring provider that maps each text to a seeded random
    unit vector. Exists to prove downstream modules depend only on the
    provider contract, not on the default hashing scheme."""

    def __init__(self, dimension: int = EMBEDDING_DIM, seed: int = 0):
        self.name = f"seeded-random-{seed}"
        self.dimension = dimension
        self._seed = seed

    def embed(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise EmptyText("cannot embed empty or whitespace-only text")
        canonical = unicodedata.normalize("NFC", text)
        h = fnv1a_64(canonical.encode("utf-8")) ^ self._seed
        rng = np.random.default_rng(h & _U64)
        vec = rng.standard_normal(self.dimension)
        vec /= np.linalg.norm(vec)
        return vec.astype(np.float32)


DEFAULT_EMBEDDER = HashedFeatureEmbedder()


def embed_text(text: str, provider: HashedFeatureEmbedder | None = None) -> np.ndarray:
    """Embed text with the given provider (default: hashed features)."""
    return (provider or DEFAULT_EMBEDDER).embed(text)
