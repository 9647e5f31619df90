"""Tweet embedding and similarity over an embedder backend.

Pooling is the mean over final-layer token states followed by L2
normalization, so downstream cosines are plain dot products.
"""
from __future__ import annotations

import numpy as np

from ..errors import EncoderFailure
from ..preprocessing import normalize


def embed_tweet(encoder, text: str) -> np.ndarray:
    """L2-normalized mean-pooled embedding of the normalized text."""
    clean = normalize(text).text
    try:
        states = np.asarray(encoder.token_states(clean), dtype=float)
    except EncoderFailure:
        raise
    except Exception as exc:
        raise EncoderFailure(str(exc)) from exc
    if states.ndim != 2 or states.shape[0] == 0:
        raise EncoderFailure("encoder produced no token states")
    pooled = states.mean(axis=0)
    norm = float(np.linalg.norm(pooled))
    if norm == 0.0:
        raise EncoderFailure("pooled embedding has zero norm")
    return pooled / norm


def tweet_similarity(encoder, t1: str, t2: str) -> float:
    """Cosine similarity rescaled to a 0-100 display scale."""
    v1, v2 = embed_tweet(encoder, t1), embed_tweet(encoder, t2)
    return similarity_score(float(np.dot(v1, v2)))


def similarity_score(cos: float) -> float:
    return 100.0 * (cos + 1.0) / 2.0
