"""Fine-tuning protocol: grid search over learning rate and epoch count,
validation-selected.

Two base-model families are supported through the ``base_model_uri``
scheme:
  tiny://<dim>   hashing bag-of-words classifier (< 1M params, CPU, used
                 by the scaled-down benchmark protocol and the tests)
  hf://<repo>    transformer encoder via the optional `models` extra
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergedLoss, EmptyGrid
from ..preprocessing import normalize
from ..registry import ModelCard, ModelHandle, TaskSpec
from .datasets import LabeledDataset
from .metrics import apply_metric

DEFAULT_LEARNING_RATES = (1e-5, 2e-5, 5e-5)
DEFAULT_EPOCHS = tuple(range(1, 11))


@dataclass
class FinetuneGrid:
    learning_rates: tuple[float, ...] = DEFAULT_LEARNING_RATES
    epochs: tuple[int, ...] = DEFAULT_EPOCHS
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.learning_rates or not self.epochs or not self.seeds:
            raise EmptyGrid("grid lists must be non-empty")

    def cells(self):
        return [(lr, ep) for lr in self.learning_rates for ep in self.epochs]


@dataclass
class FinetuneLog:
    cells: list[dict] = field(default_factory=list)  # lr, epochs, val score

    def best(self):
        return max(self.cells, key=lambda c: c["validation_score"])


def _hash_features(texts, dim, seed=0):
    """Hashing bag-of-words featurizer (deterministic, vocabulary-free;
    crc32 rather than hash() so runs are reproducible across processes)."""
    import torch

    out = torch.zeros((len(texts), dim))
    for row, text in enumerate(texts):
        for tok in normalize(text).text.lower().split():
            out[row, zlib.crc32(f"{seed}:{tok}".encode()) % dim] += 1.0
    n = out.norm(dim=1, keepdim=True).clamp_min(1.0)
    return out / n


class TinyTextClassifier:
    """Hashing BoW + two-layer head; small enough to grid-search on CPU."""

    def __init__(self, num_labels: int, dim: int = 512, hidden: int = 64, seed: int = 0):
        import torch

        torch.manual_seed(seed)
        self.dim = dim
        self.seed = seed
        self.num_labels = num_labels
        self.net = torch.nn.Sequential(
            torch.nn.Linear(dim, hidden),
            torch.nn.Tanh(),
            torch.nn.Linear(hidden, num_labels),
        )

    def parameters(self):
        return self.net.parameters()

    def forward(self, texts):
        return self.net(_hash_features(texts, self.dim, self.seed))

    def logits(self, texts):
        import torch

        with torch.no_grad():
            return self.forward(list(texts)).numpy()


def _train_cell(model_factory, train: LabeledDataset, lr: float, epochs: int,
                multi_label: bool, batch_size: int = 16):
    import torch

    model = model_factory()
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    if multi_label:
        targets = torch.zeros((len(train), len(train.label_map)))
        for i, labels in enumerate(train.gold):
            for c in labels:
                targets[i, c] = 1.0
        loss_fn = torch.nn.BCEWithLogitsLoss()
    else:
        targets = torch.tensor(train.gold, dtype=torch.long)
        loss_fn = torch.nn.CrossEntropyLoss()

    n = len(train)
    order = np.arange(n)
    rng = np.random.default_rng(0)
    for _ in range(epochs):
        rng.shuffle(order)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            opt.zero_grad()
            logits = model.forward([train.texts[i] for i in idx])
            loss = loss_fn(logits, targets[idx])
            if not torch.isfinite(loss):
                raise DivergedLoss(f"non-finite loss at lr={lr}, epochs={epochs}")
            loss.backward()
            opt.step()
    return model


def _score(model, spec: TaskSpec, dataset: LabeledDataset, threshold=0.5):
    logits = np.asarray(model.logits(dataset.texts))
    if spec.problem_type == "multi_label":
        scores = 1.0 / (1.0 + np.exp(-logits))
        pred = [set(np.nonzero(row >= threshold)[0].tolist()) for row in scores]
    else:
        pred = logits.argmax(axis=1).tolist()
    return apply_metric(spec.metric, dataset.gold, pred, len(dataset.label_map))


def _make_factory(base_model_uri: str, num_labels: int, seed: int):
    if base_model_uri.startswith("tiny://"):
        dim = int(base_model_uri.removeprefix("tiny://") or 512)
        return lambda: TinyTextClassifier(num_labels, dim=dim, seed=seed)
    if base_model_uri.startswith("hf://"):
        repo = base_model_uri.removeprefix("hf://")
        raise NotImplementedError(
            f"transformer fine-tuning of {repo!r} requires the 'models' extra "
            "and is exercised outside the test suite")
    raise ValueError(f"unknown base model uri {base_model_uri!r}")


def finetune(base_model_uri: str, train: LabeledDataset,
             validation: LabeledDataset, grid: FinetuneGrid,
             spec: TaskSpec, seed: int = 0) -> tuple[ModelHandle, FinetuneLog]:
    """Train one model per (lr, epochs) cell, keep the one with the best
    validation score under the task's official metric."""
    if not len(train) or not len(validation):
        raise ValueError("train and validation splits must be non-empty")
    factory = _make_factory(base_model_uri, len(spec.labels), seed)
    multi = spec.problem_type == "multi_label"

    log = FinetuneLog()
    best = None
    for lr, epochs in grid.cells():
        model = _train_cell(factory, train, lr, epochs, multi)
        val_score = _score(model, spec, validation)
        log.cells.append({"learning_rate": lr, "epochs": epochs,
                          "validation_score": val_score})
        if best is None or val_score > best[0]:
            best = (val_score, model)

    card = ModelCard(task=spec.name, language_scope="english",
                     source_uri=f"{base_model_uri}#finetuned-seed{seed}",
                     revision="local", backend_kind="encoder_classifier")
    handle = ModelHandle(card=card, spec=spec, backend=best[1])
    return handle, log
