"""Backend protocols and deterministic stub backends.

A backend is the loaded encoder+head behind a ModelHandle. Four kinds
exist, one per problem family. Real models (see ``hf_backend``) and the
stubs here implement the same duck-typed surface, so everything above the
backend layer is testable without network or GPU.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence, runtime_checkable

import numpy as np

from .errors import EncoderFailure


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int


@runtime_checkable
class ClassifierBackend(Protocol):
    num_labels: int

    def logits(self, texts: Sequence[str]) -> np.ndarray:
        """Return a [len(texts), num_labels] float array of raw logits."""


@runtime_checkable
class TaggerBackend(Protocol):
    tag_names: list[str]  # BIO tags including "O"

    def tag_logits(self, text: str) -> tuple[list[Token], np.ndarray]:
        """Tokenize and return (tokens, [n_tokens, n_tags] logits)."""

    def tag_logits_tokens(self, tokens: Sequence[str]) -> np.ndarray:
        """Logits for a pre-tokenized sentence (evaluation path)."""


@runtime_checkable
class MlmBackend(Protocol):
    mask_token: str
    vocab: list[str]

    def mask_distributions(self, text: str) -> list[np.ndarray]:
        """Per mask occurrence (in order), a [vocab] probability array."""


@runtime_checkable
class EmbedderBackend(Protocol):
    dim: int

    def token_states(self, text: str) -> np.ndarray:
        """Final-layer token states, [n_tokens, dim]."""


# ---------------------------------------------------------------------------
# Stubs


class StubClassifier:
    """Classifier with fixed or text-derived logits."""

    def __init__(self, num_labels: int,
                 logits_fn: Callable[[str], Sequence[float]] | None = None,
                 constant: Sequence[float] | None = None):
        self.num_labels = num_labels
        if logits_fn is None:
            vec = np.zeros(num_labels) if constant is None else np.asarray(constant, float)
            if vec.shape != (num_labels,):
                raise ValueError("constant logits shape mismatch")
            logits_fn = lambda text: vec
        self._fn = logits_fn

    def logits(self, texts):
        out = np.stack([np.asarray(self._fn(t), dtype=float) for t in texts])
        if out.shape[1] != self.num_labels:
            raise EncoderFailure("stub logits dimension mismatch")
        return out


class EchoClassifier:
    """Reads the gold label index out of the text itself ("label:2" or
    "labels:1 3"); used as the oracle stub in benchmark tests."""

    def __init__(self, num_labels, multi_label=False, hi=10.0, lo=-10.0):
        self.num_labels = num_labels
        self.multi_label = multi_label
        self.hi, self.lo = hi, lo

    def _one(self, text):
        vec = np.full(self.num_labels, self.lo)
        for part in text.split():
            if part.startswith("label:") or part.startswith("labels:"):
                ids = part.split(":", 1)[1]
                for tok in ids.split(","):
                    if tok:
                        vec[int(tok)] = self.hi
        return vec

    def logits(self, texts):
        return np.stack([self._one(t) for t in texts])


class StubTagger:
    """Whitespace tokenizer plus a per-token tag function."""

    def __init__(self, entity_types: Sequence[str],
                 tag_fn: Callable[[list[str]], list[str]] | None = None,
                 hi=10.0, lo=-10.0):
        self.tag_names = ["O"]
        for t in entity_types:
            self.tag_names += [f"B-{t}", f"I-{t}"]
        # default: a token whose surface is itself a BIO tag echoes it
        self._fn = tag_fn or (lambda toks: [t if t in self.tag_names else "O" for t in toks])
        self.hi, self.lo = hi, lo

    def _tokenize(self, text):
        tokens = []
        pos = 0
        for surf in text.split():
            start = text.index(surf, pos)
            tokens.append(Token(surf, start, start + len(surf)))
            pos = start + len(surf)
        return tokens

    def _logits_for_tags(self, tags):
        out = np.full((len(tags), len(self.tag_names)), self.lo)
        for i, tag in enumerate(tags):
            out[i, self.tag_names.index(tag)] = self.hi
        return out

    def tag_logits(self, text):
        tokens = self._tokenize(text)
        tags = self._fn([t.surface for t in tokens])
        return tokens, self._logits_for_tags(tags)

    def tag_logits_tokens(self, tokens):
        return self._logits_for_tags(self._fn(list(tokens)))


class StubMlm:
    """Mask filler with a fixed vocabulary distribution."""

    def __init__(self, vocab: Sequence[str], mask_token="<mask>",
                 probs: Sequence[float] | None = None):
        self.vocab = list(vocab)
        self.mask_token = mask_token
        if probs is None:
            probs = np.full(len(self.vocab), 1.0 / len(self.vocab))
        self._probs = np.asarray(probs, float)

    def mask_distributions(self, text):
        n = text.count(self.mask_token)
        return [self._probs.copy() for _ in range(n)]


class StubEmbedder:
    """Maps each whitespace token to a vector via a lookup, mean-poolable."""

    def __init__(self, dim: int, lookup: Callable[[str], Sequence[float]] | dict | None = None):
        self.dim = dim
        if lookup is None:
            lookup = self._hash_vector
        self._lookup = lookup

    def _hash_vector(self, token):
        rng = np.random.default_rng(abs(hash(token)) % (2**32))
        return rng.standard_normal(self.dim)

    def token_states(self, text):
        tokens = text.split()
        if not tokens:
            raise EncoderFailure("no tokens to embed")
        if isinstance(self._lookup, dict):
            rows = [self._lookup[t] for t in tokens]
        else:
            rows = [self._lookup(t) for t in tokens]
        return np.asarray(rows, dtype=float).reshape(len(tokens), self.dim)


class MappingEmbedder:
    """Embedder returning a fixed whole-text vector per input (synthetic
    retrieval/similarity fixtures)."""

    def __init__(self, mapping: dict, dim: int):
        self.dim = dim
        self._mapping = mapping

    def token_states(self, text):
        try:
            vec = np.asarray(self._mapping[text], dtype=float)
        except KeyError as exc:
            raise EncoderFailure(f"no fixture vector for {text!r}") from exc
        return vec.reshape(1, self.dim)
