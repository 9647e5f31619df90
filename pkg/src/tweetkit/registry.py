"""Task and model registry: task specs, model cards, and the `load` entry point.

The registry is seeded from a declarative manifest (JSON) so model sources
can be swapped without code changes; `default_registry()` uses the manifest
shipped under ``tweetkit/data/``.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from . import builtin
from .errors import IncompatibleHead, UnknownTarget, UnknownTask, UnsupportedLanguage

CACHE_DIR_ENV = "TWEETKIT_CACHE_DIR"
MODEL_STORE_ENV = "TWEETKIT_MODEL_STORE"

PROBLEM_TYPES = ("single_label", "multi_label", "sequence_label", "mask_fill", "sentence_embed")
BACKEND_KINDS = ("encoder_classifier", "encoder_tagger", "encoder_mlm", "encoder_embedder")


@dataclass(frozen=True)
class TaskSpec:
    name: str
    problem_type: str
    labels: tuple[str, ...]
    metric: str | None  # e.g. "macro_f1", "f1_of_class:1", "avg_f_two_classes:2,1"
    needs_target: bool = False

    def __post_init__(self):
        if self.problem_type not in PROBLEM_TYPES:
            raise ValueError(f"unknown problem type {self.problem_type!r}")
        if self.problem_type in ("single_label", "multi_label", "sequence_label"):
            if not self.labels:
                raise ValueError(f"task {self.name!r} needs a non-empty label set")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"task {self.name!r} has duplicate labels")


@dataclass(frozen=True)
class ModelCard:
    task: str
    language_scope: str | tuple[str, ...]  # "english" or tuple of codes
    source_uri: str
    revision: str
    backend_kind: str
    target: str | None = None  # stance only

    def __post_init__(self):
        if self.backend_kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind {self.backend_kind!r}")
        if not self.revision or self.revision == "latest":
            raise ValueError("revision must be pinned (no floating 'latest')")

    def covers_language(self, code: str | None) -> bool:
        if code is None or code == "en":
            return self.language_scope == "english"
        return self.language_scope != "english" and code in self.language_scope


@dataclass(frozen=True)
class ModelHandle:
    card: ModelCard
    spec: TaskSpec
    backend: object


@dataclass(frozen=True)
class StanceHandle:
    """Stance is one task with per-target model cards; backends resolve
    lazily by target through the owning registry."""

    spec: TaskSpec
    cards: dict = field(hash=False, default_factory=dict)  # target -> ModelCard
    loader: Callable = None

    def targets(self):
        return sorted(self.cards)


def builtin_tasks() -> list[TaskSpec]:
    return [
        TaskSpec("sentiment", "single_label", tuple(builtin.SENTIMENT_LABELS), "macro_recall"),
        TaskSpec("emotion", "single_label", tuple(builtin.EMOTION_LABELS), "macro_f1"),
        TaskSpec("emoji", "single_label", tuple(builtin.EMOJI_LABELS), "macro_f1"),
        TaskSpec("irony", "single_label", tuple(builtin.IRONY_LABELS), "f1_of_class:1"),
        TaskSpec("hate", "single_label", tuple(builtin.HATE_LABELS), "macro_f1"),
        TaskSpec("offensive", "single_label", tuple(builtin.OFFENSIVE_LABELS), "macro_f1"),
        TaskSpec("stance", "single_label", tuple(builtin.STANCE_LABELS),
                 "avg_f_two_classes:2,1", needs_target=True),
        TaskSpec("topic", "multi_label", tuple(builtin.TOPIC_LABELS), "multilabel_macro_f1"),
        TaskSpec("ner", "sequence_label", tuple(builtin.NER_ENTITY_TYPES), "span_macro_f1"),
        # auxiliary entry points from the load() surface, not benchmark rows
        TaskSpec("language_model", "mask_fill", (), None),
        TaskSpec("sentence_embedding", "sentence_embed", (), "accuracy_at_1"),
    ]

# The nine benchmark tasks (Table-style evaluation rows), in display order.
BENCHMARK_TASKS = ("emoji", "emotion", "hate", "irony", "ner", "offensive",
                   "sentiment", "stance", "topic")


_CARD_FIELDS = {"task", "language_scope", "source_uri", "revision", "backend_kind", "target"}


def parse_manifest(text: str) -> list[ModelCard]:
    """Parse a manifest document (JSON list of card records, or one JSON
    record per line). Unknown fields are rejected."""
    text = text.strip()
    if text.startswith("["):
        records = json.loads(text)
    else:
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
    cards = []
    for i, rec in enumerate(records):
        unknown = set(rec) - _CARD_FIELDS
        if unknown:
            raise ValueError(f"manifest record {i}: unknown fields {sorted(unknown)}")
        scope = rec["language_scope"]
        if isinstance(scope, list):
            scope = tuple(scope)
        cards.append(ModelCard(
            task=rec["task"], language_scope=scope, source_uri=rec["source_uri"],
            revision=rec["revision"], backend_kind=rec["backend_kind"],
            target=rec.get("target"),
        ))
    return cards


def cache_dir() -> str:
    return os.environ.get(CACHE_DIR_ENV, os.path.expanduser("~/.cache/tweetkit"))


def model_store_base() -> str | None:
    return os.environ.get(MODEL_STORE_ENV)


class Registry:
    """Task/model registry. Reads are safe concurrently; mutation is locked."""

    def __init__(self, tasks: list[TaskSpec] | None = None,
                 cards: list[ModelCard] | None = None,
                 backend_factory: Callable[[ModelCard, TaskSpec], object] | None = None):
        self._lock = threading.Lock()
        self._tasks: dict[str, TaskSpec] = {}
        self._cards: list[ModelCard] = []
        for spec in (tasks if tasks is not None else builtin_tasks()):
            self._tasks[spec.name] = spec
        for card in cards or []:
            self.register_card(card)
        if backend_factory is None:
            from .hf_backend import load_backend as backend_factory
        self._backend_factory = backend_factory
        self._handle_cache: dict[tuple, ModelHandle] = {}

    # -- task surface

    def list_tasks(self) -> list[TaskSpec]:
        return list(self._tasks.values())

    def task(self, name: str) -> TaskSpec:
        try:
            return self._tasks[name]
        except KeyError:
            raise UnknownTask(f"unknown task {name!r}") from None

    def register_task(self, spec: TaskSpec):
        with self._lock:
            self._tasks[spec.name] = spec

    def register_card(self, card: ModelCard):
        with self._lock:
            if card.task not in self._tasks:
                raise UnknownTask(f"card references unknown task {card.task!r}")
            self._cards.append(card)

    # -- model resolution

    def resolve_model(self, task: str, language: str | None = None,
                      target: str | None = None) -> ModelCard:
        spec = self.task(task)
        candidates = [c for c in self._cards if c.task == task]
        if spec.needs_target and target is not None:
            with_target = [c for c in candidates if c.target == target]
            candidates = with_target or [c for c in candidates if c.target is None]
            if not candidates:
                raise UnknownTarget(f"no {task!r} model covers target {target!r}")
        for card in candidates:
            if card.covers_language(language):
                return card
        raise UnsupportedLanguage(task, language)

    def load(self, task: str, model_id: str | None = None,
             language: str | None = None, target: str | None = None) -> ModelHandle | StanceHandle:
        """Load a ready-to-use handle for a task.

        ``model_id`` overrides the registry's default card. For stance
        without an explicit target, a StanceHandle resolving per-target
        backends lazily is returned.
        """
        spec = self.task(task)
        if spec.needs_target and target is None and model_id is None:
            cards = {c.target: c for c in self._cards if c.task == task and c.target}
            return StanceHandle(spec=spec, cards=cards, loader=self._load_card)
        if model_id is not None:
            base = self.resolve_model(task, language, target) if self._has_card(task) else None
            card = ModelCard(task=task, language_scope=(base.language_scope if base else "english"),
                             source_uri=model_id, revision="pinned-by-uri",
                             backend_kind=(base.backend_kind if base else _kind_for(spec)),
                             target=target)
        else:
            card = self.resolve_model(task, language, target)
        return self._load_card(card, spec)

    def _has_card(self, task):
        return any(c.task == task for c in self._cards)

    def _load_card(self, card: ModelCard, spec: TaskSpec) -> ModelHandle:
        key = (card.source_uri, card.revision, spec.name)
        handle = self._handle_cache.get(key)
        if handle is not None:
            return handle
        backend = self._backend_factory(card, spec)
        _check_head(backend, card, spec)
        handle = ModelHandle(card=card, spec=spec, backend=backend)
        with self._lock:
            self._handle_cache[key] = handle
        return handle


def _kind_for(spec: TaskSpec) -> str:
    return {
        "single_label": "encoder_classifier",
        "multi_label": "encoder_classifier",
        "sequence_label": "encoder_tagger",
        "mask_fill": "encoder_mlm",
        "sentence_embed": "encoder_embedder",
    }[spec.problem_type]


def _check_head(backend, card: ModelCard, spec: TaskSpec):
    if card.backend_kind == "encoder_classifier":
        n = getattr(backend, "num_labels", None)
        if n is not None and n != len(spec.labels):
            raise IncompatibleHead(
                f"backend has {n} outputs but task {spec.name!r} has {len(spec.labels)} labels")
    elif card.backend_kind == "encoder_tagger":
        names = getattr(backend, "tag_names", None)
        if names is not None and len(names) != 2 * len(spec.labels) + 1:
            raise IncompatibleHead(
                f"tagger has {len(names)} tags but task expects {2 * len(spec.labels) + 1}")


def default_manifest_text() -> str:
    return resources.files("tweetkit.data").joinpath("model_manifest.json").read_text("utf-8")


def default_registry(backend_factory=None) -> Registry:
    return Registry(cards=parse_manifest(default_manifest_text()),
                    backend_factory=backend_factory)
