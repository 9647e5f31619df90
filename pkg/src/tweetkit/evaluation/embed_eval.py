"""Embedding evaluations: word similarity, STS, and tweet-reply retrieval."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..embeddings.tweets import embed_tweet
from ..embeddings.words import WordTable, word_similarity
from ..errors import OutOfVocabulary, ZeroVector
from .metrics import spearman


@dataclass
class WordSimilarityResult:
    spearman: float
    pairs_used: int
    pairs_dropped: int


def evaluate_word_similarity(table: WordTable, dataset) -> WordSimilarityResult:
    """Spearman correlation between model cosines and gold scores over
    (w1, w2, gold) triples; unresolvable pairs are dropped and counted."""
    cosines, golds, dropped = [], [], 0
    for w1, w2, gold in dataset:
        try:
            cosines.append(word_similarity(table, w1, w2))
        except (OutOfVocabulary, ZeroVector):
            dropped += 1
            continue
        golds.append(gold)
    return WordSimilarityResult(spearman=spearman(cosines, golds),
                                pairs_used=len(cosines), pairs_dropped=dropped)


def evaluate_sts(encoder, dataset) -> float:
    """Spearman over raw embedding cosines vs gold similarity scores."""
    cosines, golds = [], []
    for s1, s2, gold in dataset:
        v1, v2 = embed_tweet(encoder, s1), embed_tweet(encoder, s2)
        cosines.append(float(np.dot(v1, v2)))
        golds.append(gold)
    return spearman(cosines, golds)


@dataclass
class RetrievalResult:
    mean_accuracy: float
    per_set: list[float] = field(default_factory=list)
    search_space_size: int = 0


def evaluate_retrieval_sets(encoder, pair_sets, search_replies=None) -> RetrievalResult:
    """accuracy@1 per query set against one shared reply search space.

    ``pair_sets`` is a list of lists of (tweet, reply). The search space is
    ``search_replies`` if given, else the union of all replies across sets.
    """
    if search_replies is None:
        search_replies = [r for pairs in pair_sets for _, r in pairs]
    reply_vecs = np.stack([embed_tweet(encoder, r) for r in search_replies])
    reply_index = {}
    for i, r in enumerate(search_replies):
        reply_index.setdefault(r, i)

    per_set = []
    for pairs in pair_sets:
        hits = 0
        for tweet, reply in pairs:
            v = embed_tweet(encoder, tweet)
            best = int(np.argmax(reply_vecs @ v))
            if best == reply_index[reply]:
                hits += 1
        per_set.append(hits / len(pairs))
    return RetrievalResult(mean_accuracy=float(np.mean(per_set)), per_set=per_set,
                           search_space_size=len(search_replies))
