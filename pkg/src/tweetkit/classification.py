"""Tweet classification over loaded model handles.

All operations normalize the input first, run the backend's logits, and
apply the decision rule for the task's problem type. Ties break toward
the lowest label index so outputs are deterministic.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EncoderFailure, KTooLarge, UnknownTarget, WrongProblemType
from .preprocessing import normalize
from .registry import ModelHandle, StanceHandle

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Prediction:
    label: str | None
    labels: frozenset[str] | None
    distribution: dict[str, float]

    @classmethod
    def single(cls, label, distribution):
        return cls(label=label, labels=None, distribution=distribution)

    @classmethod
    def multi(cls, labels, distribution):
        return cls(label=None, labels=frozenset(labels), distribution=distribution)


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max()
    e = np.exp(z)
    return e / e.sum()


def _logits_for(handle: ModelHandle, texts: list[str]) -> np.ndarray:
    clean = [normalize(t).text for t in texts]
    try:
        return np.asarray(handle.backend.logits(clean), dtype=float)
    except EncoderFailure:
        raise
    except Exception as exc:
        raise EncoderFailure(str(exc)) from exc


def predict(handle: ModelHandle, text: str) -> Prediction:
    """Single-label prediction: softmax distribution plus argmax label."""
    if handle.spec.problem_type != "single_label":
        raise WrongProblemType(f"predict() needs a single_label task, got {handle.spec.problem_type}")
    probs = _softmax(_logits_for(handle, [text])[0])
    labels = handle.spec.labels
    idx = int(np.argmax(probs))  # first max wins: lowest-index tie-break
    return Prediction.single(labels[idx], {l: float(p) for l, p in zip(labels, probs)})


def predict_topk(handle: ModelHandle, text: str, k: int) -> list[tuple[str, float]]:
    """Top-k labels by probability, descending, stable (label-index) on ties."""
    pred = predict(handle, text)
    labels = handle.spec.labels
    if k > len(labels):
        raise KTooLarge(f"k={k} exceeds label count {len(labels)}")
    order = sorted(range(len(labels)), key=lambda i: (-pred.distribution[labels[i]], i))
    return [(labels[i], pred.distribution[labels[i]]) for i in order[:k]]


def predict_multilabel(handle: ModelHandle, text: str, threshold: float = 0.5) -> Prediction:
    """Multi-label prediction: per-label logistic scores, threshold decision."""
    if handle.spec.problem_type != "multi_label":
        raise WrongProblemType(f"predict_multilabel() needs a multi_label task, got {handle.spec.problem_type}")
    logits = _logits_for(handle, [text])[0]
    scores = 1.0 / (1.0 + np.exp(-logits))
    labels = handle.spec.labels
    chosen = [l for l, s in zip(labels, scores) if s >= threshold]
    return Prediction.multi(chosen, {l: float(s) for l, s in zip(labels, scores)})


def predict_stance(handle: StanceHandle, text: str, target: str) -> Prediction:
    """Stance prediction; the target selects its per-target model."""
    if not target:
        raise UnknownTarget("stance prediction requires a non-empty target")
    card = handle.cards.get(target)
    if card is None:
        raise UnknownTarget(f"no stance model covers target {target!r}")
    return predict(handle.loader(card, handle.spec), text)


def predict_batch(handle: ModelHandle, texts: list[str]) -> list[Prediction]:
    """Order-preserving batch prediction, elementwise equal to predict()."""
    out = []
    for i, text in enumerate(texts):
        try:
            if handle.spec.problem_type == "multi_label":
                out.append(predict_multilabel(handle, text))
            else:
                out.append(predict(handle, text))
        except Exception as exc:
            exc.args = (f"item {i}: {exc}",)
            raise
    return out
