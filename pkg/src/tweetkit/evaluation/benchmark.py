"""Task evaluation and the multi-seed benchmark runner."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .. import classification
from ..errors import TaskMismatch
from ..ner import tag_spans
from ..registry import BENCHMARK_TASKS, Registry, TaskSpec, builtin_tasks
from ..backends import EchoClassifier, StubTagger
from ..registry import ModelCard, ModelHandle
from .datasets import LabeledDataset, load_dataset, warn_if_not_test
from .finetune import FinetuneGrid, finetune
from .metrics import apply_metric


def evaluate_task(handle: ModelHandle, dataset: LabeledDataset,
                  threshold: float = 0.5) -> float:
    """Apply the task's official metric to model predictions over a split."""
    if handle.spec.name != dataset.task:
        raise TaskMismatch(
            f"handle is for {handle.spec.name!r} but dataset is {dataset.task!r}")
    warn_if_not_test(dataset)
    spec = handle.spec
    labels = list(spec.labels)

    if spec.problem_type == "single_label":
        preds = classification.predict_batch(handle, dataset.texts)
        pred = [labels.index(p.label) for p in preds]
        gold = dataset.gold
    elif spec.problem_type == "multi_label":
        preds = [classification.predict_multilabel(handle, t, threshold) for t in dataset.texts]
        pred = [{labels.index(l) for l in p.labels} for p in preds]
        gold = dataset.gold
    elif spec.problem_type == "sequence_label":
        pred, gold = [], []
        for tokens, gold_tags in zip(dataset.texts, dataset.gold):
            logits = np.asarray(handle.backend.tag_logits_tokens(tokens))
            names = handle.backend.tag_names
            pred_tags = [names[i] for i in logits.argmax(axis=1)]
            pred.append(tag_spans(pred_tags))
            gold.append(tag_spans(gold_tags))
    else:
        raise TaskMismatch(f"no evaluation path for problem type {spec.problem_type!r}")
    return apply_metric(spec.metric, gold, pred, len(labels))


@dataclass
class BenchmarkReport:
    seeds: tuple[int, ...]
    scores: dict[str, float] = field(default_factory=dict)        # task -> mean
    per_run: dict[str, list[float]] = field(default_factory=dict)  # task -> per-seed
    failures: dict[str, str] = field(default_factory=dict)
    grid_logs: dict[str, list] = field(default_factory=dict)

    def to_dict(self):
        return {"seeds": list(self.seeds), "scores": self.scores,
                "per_run": self.per_run, "failures": self.failures,
                "grid_logs": self.grid_logs}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def render_report(report: BenchmarkReport) -> str:
    """Plain-text results table, scores shown as percentages."""
    tasks = sorted(set(report.scores) | set(report.failures))
    width = max((len(t) for t in tasks), default=4)
    lines = [f"{'task'.ljust(width)}  score  runs"]
    for task in tasks:
        if task in report.failures:
            lines.append(f"{task.ljust(width)}  FAILED ({report.failures[task]})")
        else:
            runs = " ".join(f"{100 * s:.1f}" for s in report.per_run[task])
            lines.append(f"{task.ljust(width)}  {100 * report.scores[task]:5.1f}  [{runs}]")
    return "\n".join(lines)


def oracle_handle(spec: TaskSpec) -> ModelHandle:
    """Stub handle that reads the gold label out of the input itself
    ("label:i" texts; tag-named tokens for NER). Benchmark plumbing
    oracle: every metric must come out at exactly 1."""
    if spec.problem_type == "sequence_label":
        backend = StubTagger(spec.labels)
    else:
        backend = EchoClassifier(len(spec.labels),
                                 multi_label=spec.problem_type == "multi_label")
    card = ModelCard(task=spec.name, language_scope="english",
                     source_uri="oracle://echo", revision="oracle",
                     backend_kind="encoder_tagger" if spec.problem_type == "sequence_label"
                     else "encoder_classifier")
    return ModelHandle(card=card, spec=spec, backend=backend)


def run_benchmark(base_model_uri: str, tasks=BENCHMARK_TASKS, data_dir: str = ".",
                  seeds=(0, 1, 2), grid: FinetuneGrid | None = None) -> BenchmarkReport:
    """Per task and seed: fine-tune on train/validation, evaluate on test;
    report the arithmetic mean over seeds. A failing task is recorded and
    skipped without aborting the rest.

    ``base_model_uri`` "oracle://echo" skips fine-tuning and evaluates the
    gold-echoing stub (protocol self-check).
    """
    specs = {s.name: s for s in builtin_tasks()}
    report = BenchmarkReport(seeds=tuple(seeds))
    for task in tasks:
        spec = specs[task]
        try:
            runs = []
            log = []
            for seed in seeds:
                if base_model_uri == "oracle://echo":
                    handle = oracle_handle(spec)
                else:
                    train = load_dataset(task, "train", data_dir, spec.problem_type)
                    val = load_dataset(task, "validation", data_dir, spec.problem_type)
                    cell_grid = grid or FinetuneGrid()
                    handle, cell_log = finetune(base_model_uri, train, val,
                                                cell_grid, spec, seed=seed)
                    log.append({"seed": seed, "cells": cell_log.cells})
                test = load_dataset(task, "test", data_dir, spec.problem_type)
                runs.append(evaluate_task(handle, test))
            report.per_run[task] = runs
            report.scores[task] = float(np.mean(runs))
            if log:
                report.grid_logs[task] = log
        except Exception as exc:
            report.failures[task] = f"{type(exc).__name__}: {exc}"
    return report
