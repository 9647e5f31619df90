"""Model-hub backed backends (transformers). Imported lazily; everything in
the test suite runs against the stubs in ``backends`` instead.

Weights are cached under the configured cache directory keyed by
(source_uri, revision) so reruns work offline.
"""
from __future__ import annotations

import os

import numpy as np

from .backends import Token
from .errors import ModelFetchError
from .registry import ModelCard, TaskSpec, cache_dir, model_store_base


def _load_transformers():
    try:
        import torch  # noqa: F401
        import transformers
    except ImportError as exc:
        raise ModelFetchError(
            "the 'transformers' extra is required for hub-backed models") from exc
    return transformers


def _hub_kwargs(card: ModelCard):
    kw = {"revision": card.revision,
          "cache_dir": os.path.join(cache_dir(), "models")}
    base = model_store_base()
    if base:
        os.environ.setdefault("HF_ENDPOINT", base)
    return kw


class HubClassifier:
    def __init__(self, card: ModelCard):
        tr = _load_transformers()
        try:
            kw = _hub_kwargs(card)
            self._tok = tr.AutoTokenizer.from_pretrained(card.source_uri, **kw)
            self._model = tr.AutoModelForSequenceClassification.from_pretrained(card.source_uri, **kw)
        except OSError as exc:
            raise ModelFetchError(str(exc)) from exc
        self._model.eval()
        self.num_labels = self._model.config.num_labels

    def logits(self, texts):
        import torch
        with torch.no_grad():
            enc = self._tok(list(texts), return_tensors="pt", padding=True, truncation=True)
            return self._model(**enc).logits.numpy()


class HubTagger:
    def __init__(self, card: ModelCard):
        tr = _load_transformers()
        try:
            kw = _hub_kwargs(card)
            self._tok = tr.AutoTokenizer.from_pretrained(card.source_uri, add_prefix_space=True, **kw)
            self._model = tr.AutoModelForTokenClassification.from_pretrained(card.source_uri, **kw)
        except OSError as exc:
            raise ModelFetchError(str(exc)) from exc
        self._model.eval()
        id2label = self._model.config.id2label
        self.tag_names = [id2label[i] for i in range(len(id2label))]

    def tag_logits(self, text):
        import torch
        enc = self._tok(text, return_offsets_mapping=True, return_tensors="pt", truncation=True)
        offsets = enc.pop("offset_mapping")[0].tolist()
        with torch.no_grad():
            logits = self._model(**enc).logits[0].numpy()
        # keep first subword of each word; later pieces inherit the word tag
        tokens, rows = [], []
        word_ids = enc.word_ids(0) if hasattr(enc, "word_ids") else [None] * len(offsets)
        seen = set()
        for i, (start, end) in enumerate(offsets):
            wid = word_ids[i]
            if wid is None or wid in seen or start == end:
                continue
            seen.add(wid)
            span = self._tok.word_to_chars(0, wid)
            tokens.append(Token(text[span.start:span.end], span.start, span.end))
            rows.append(logits[i])
        return tokens, np.asarray(rows)

    def tag_logits_tokens(self, tokens):
        import torch
        enc = self._tok(list(tokens), is_split_into_words=True, return_tensors="pt", truncation=True)
        with torch.no_grad():
            logits = self._model(**enc).logits[0].numpy()
        word_ids = enc.word_ids(0)
        rows, seen = [], set()
        for i, wid in enumerate(word_ids):
            if wid is None or wid in seen:
                continue
            seen.add(wid)
            rows.append(logits[i])
        return np.asarray(rows)


class HubMlm:
    def __init__(self, card: ModelCard):
        tr = _load_transformers()
        try:
            kw = _hub_kwargs(card)
            self._tok = tr.AutoTokenizer.from_pretrained(card.source_uri, **kw)
            self._model = tr.AutoModelForMaskedLM.from_pretrained(card.source_uri, **kw)
        except OSError as exc:
            raise ModelFetchError(str(exc)) from exc
        self._model.eval()
        self.mask_token = self._tok.mask_token
        self.vocab = [self._tok.convert_ids_to_tokens(i) for i in range(len(self._tok))]

    def mask_distributions(self, text):
        import torch
        enc = self._tok(text, return_tensors="pt", truncation=True)
        with torch.no_grad():
            logits = self._model(**enc).logits[0]
        mask_id = self._tok.mask_token_id
        positions = (enc["input_ids"][0] == mask_id).nonzero(as_tuple=True)[0]
        return [torch.softmax(logits[p], dim=-1).numpy() for p in positions]


class HubEmbedder:
    def __init__(self, card: ModelCard):
        tr = _load_transformers()
        try:
            kw = _hub_kwargs(card)
            self._tok = tr.AutoTokenizer.from_pretrained(card.source_uri, **kw)
            self._model = tr.AutoModel.from_pretrained(card.source_uri, **kw)
        except OSError as exc:
            raise ModelFetchError(str(exc)) from exc
        self._model.eval()
        self.dim = self._model.config.hidden_size

    def token_states(self, text):
        import torch
        enc = self._tok(text, return_tensors="pt", truncation=True)
        with torch.no_grad():
            states = self._model(**enc).last_hidden_state[0]
        mask = enc["attention_mask"][0].bool()
        return states[mask].numpy()


def load_backend(card: ModelCard, spec: TaskSpec):
    return {
        "encoder_classifier": HubClassifier,
        "encoder_tagger": HubTagger,
        "encoder_mlm": HubMlm,
        "encoder_embedder": HubEmbedder,
    }[card.backend_kind](card)
