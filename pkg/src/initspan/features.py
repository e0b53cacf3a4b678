"""Hashed per-sentence feature vectors with neighbouring-sentence evidence.

Tokens of each sentence in a window around the target are hashed together
with their offset, so the same word one sentence back and one sentence
ahead lands in different buckets — the feature-space counterpart of
keeping context sentences positionally separate at the model input. No
vocabulary is fitted: hashing is deterministic (blake2b, unsalted) and
memory is bounded by hash_dim.
"""

from __future__ import annotations

from dataclasses import dataclass
from hashlib import blake2b
from typing import Sequence

from .preprocess import tokenize

_BIAS_KEY = "<bias>"


@dataclass(frozen=True)
class FeatureConfig:
    window: int = 1
    hash_dim: int = 1 << 18
    lowercase: bool = True

    def __post_init__(self):
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if self.hash_dim < 2 or self.hash_dim & (self.hash_dim - 1):
            raise ValueError("hash_dim must be a power of two >= 2")

    def as_dict(self) -> dict:
        return {"window": self.window, "hash_dim": self.hash_dim,
                "lowercase": self.lowercase}

    @classmethod
    def from_dict(cls, obj: dict) -> "FeatureConfig":
        return cls(**obj)


FeatureVector = dict[int, float]  # feature id -> value, ids < hash_dim


def _bucket(key: str, hash_dim: int) -> int:
    digest = blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") & (hash_dim - 1)


def _length_bucket(n_tokens: int) -> int:
    return min(n_tokens // 5, 20)


def extract(texts: Sequence[str], index: int, cfg: FeatureConfig) -> FeatureVector:
    """Feature vector for sentence `index` of a report given all its texts.

    Missing neighbours at report edges contribute nothing. Besides the
    offset-tagged unigrams, the vector carries a bias feature and a
    token-count bucket feature for the target sentence.
    """
    if not 0 <= index < len(texts):
        raise IndexError(f"sentence index {index} out of range")
    vec: FeatureVector = {}

    def add(key: str, value: float = 1.0):
        fid = _bucket(key, cfg.hash_dim)
        vec[fid] = vec.get(fid, 0.0) + value

    add(_BIAS_KEY)
    target_tokens = tokenize(texts[index])
    add(f"<nt:{_length_bucket(len(target_tokens))}>")
    for offset in range(-cfg.window, cfg.window + 1):
        j = index + offset
        if not 0 <= j < len(texts):
            continue
        tokens = target_tokens if offset == 0 else tokenize(texts[j])
        for tok in tokens:
            if cfg.lowercase:
                tok = tok.lower()
            add(f"{offset}|{tok}")
    return vec


def extract_report(texts: Sequence[str], cfg: FeatureConfig) -> list[FeatureVector]:
    return [extract(texts, i, cfg) for i in range(len(texts))]
