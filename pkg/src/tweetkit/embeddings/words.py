"""Word-embedding tables with subword n-gram fallback for OOV words.

Table interchange format (UTF-8 text):
  header line:  "<vocab_count> <dim>"
  rows:         "<word> v1 v2 ... v_dim"
Optional companion bucket file:
  header line:  "<bucket_count> <dim> <min_n> <max_n>"
  rows:         "<bucket_id> v1 ... v_dim"
OOV lookups hash character n-grams (word wrapped in "<"/">") with FNV-1a
64-bit modulo bucket_count and average the bucket vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import FormatError, OutOfVocabulary, ZeroVector

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a_64(data: str | bytes) -> int:
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def word_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of "<word>" for n in [min_n, max_n]."""
    wrapped = f"<{word}>"
    grams = []
    for n in range(min_n, max_n + 1):
        grams.extend(wrapped[i:i + n] for i in range(len(wrapped) - n + 1))
    return grams


@dataclass
class WordTable:
    vocab: dict[str, np.ndarray]
    dim: int
    subword_buckets: np.ndarray | None = None  # [bucket_count, dim]
    min_n: int = 2
    max_n: int = 12
    words: list[str] = field(default_factory=list)  # insertion order

    def __post_init__(self):
        if not self.words:
            self.words = list(self.vocab)
        if self.min_n > self.max_n:
            raise ValueError("min_n must be <= max_n")


def load_word_table(path, bucket_path=None) -> WordTable:
    """Load a table (and optional bucket file); dimension mismatches are
    rejected with the offending row number."""
    vocab = {}
    words = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise FormatError("header must be '<count> <dim>'", line=1)
        count, dim = int(header[0]), int(header[1])
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(" ")
            word, values = parts[0], parts[1:]
            if len(values) != dim:
                raise FormatError(f"expected {dim} values, got {len(values)}", line=lineno)
            vocab[word] = np.asarray(values, dtype=float)
            words.append(word)
    if len(vocab) != count:
        raise FormatError(f"header declares {count} words, file has {len(vocab)}")
    table = WordTable(vocab=vocab, dim=dim, words=words)
    if bucket_path is not None:
        with open(bucket_path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 4:
                raise FormatError("bucket header must be '<count> <dim> <min_n> <max_n>'", line=1)
            bcount, bdim, min_n, max_n = map(int, header)
            if bdim != dim:
                raise FormatError(f"bucket dim {bdim} != table dim {dim}", line=1)
            buckets = np.zeros((bcount, dim))
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                parts = line.rstrip("\n").split(" ")
                if len(parts) != dim + 1:
                    raise FormatError(f"expected {dim} values, got {len(parts) - 1}", line=lineno)
                buckets[int(parts[0])] = np.asarray(parts[1:], dtype=float)
        table.subword_buckets = buckets
        table.min_n, table.max_n = min_n, max_n
    return table


def word_vector(table: WordTable, word: str) -> np.ndarray:
    """Stored vector for in-vocabulary words; n-gram bucket mean otherwise."""
    vec = table.vocab.get(word)
    if vec is not None:
        return vec
    if table.subword_buckets is None:
        raise OutOfVocabulary(f"{word!r} not in vocabulary and no subword buckets loaded")
    grams = word_ngrams(word, table.min_n, table.max_n)
    if not grams:
        raise OutOfVocabulary(f"{word!r} yields no n-grams in [{table.min_n}, {table.max_n}]")
    count = table.subword_buckets.shape[0]
    rows = [table.subword_buckets[fnv1a_64(g) % count] for g in grams]
    return np.mean(rows, axis=0)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine undefined for a zero-norm vector")
    return float(np.dot(a, b) / (na * nb))


def word_similarity(table: WordTable, w1: str, w2: str) -> float:
    return cosine(word_vector(table, w1), word_vector(table, w2))


def nearest_neighbors(table: WordTable, word: str, k: int) -> list[tuple[str, float]]:
    """Top-k vocabulary words by cosine to the query, excluding the query
    itself; ties break lexicographically."""
    query = word_vector(table, word)
    qn = float(np.linalg.norm(query))
    if qn == 0.0:
        raise ZeroVector(f"query {word!r} has a zero-norm vector")
    scored = []
    for other in table.words:
        if other == word:
            continue
        vec = table.vocab[other]
        n = float(np.linalg.norm(vec))
        sim = float(np.dot(query, vec) / (qn * n)) if n > 0 else float("-inf")
        scored.append((other, sim))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]
