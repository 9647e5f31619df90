"""Dataset loading in the unified text-file format.

Per-task layout under a data directory:
  <task>/<split>_text.txt     one tweet per line
  <task>/<split>_labels.txt   aligned gold: one label index per line
                              (space-separated indices for multi-label)
  <task>/mapping.txt          "<index>\t<label>" per line
Sequence-labeling tasks instead use one file per split with
"<token>\t<tag>" lines and blank-line sentence separators:
  <task>/<split>.txt
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

from ..errors import FormatError, LengthMismatch

SPLITS = ("train", "validation", "test")


@dataclass
class LabeledDataset:
    task: str
    split: str
    texts: list  # str per example; token list for sequence labeling
    gold: list   # int | set[int] | list[str] tags | float per problem type
    label_map: list[str]
    problem_type: str = "single_label"

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}")
        if len(self.texts) != len(self.gold):
            raise LengthMismatch(
                f"{len(self.texts)} texts vs {len(self.gold)} gold entries")

    def __len__(self):
        return len(self.texts)


def _read_mapping(path) -> list[str]:
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise FormatError("mapping line must be '<index>\\t<label>'", line=lineno)
            labels[int(parts[0])] = parts[1]
    if sorted(labels) != list(range(len(labels))):
        raise FormatError("mapping indices must be contiguous from 0")
    return [labels[i] for i in range(len(labels))]


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def load_dataset(task: str, split: str, source_path: str,
                 problem_type: str = "single_label") -> LabeledDataset:
    """Load one task split; errors carry the offending line number."""
    task_dir = os.path.join(source_path, task)
    label_map = _read_mapping(os.path.join(task_dir, "mapping.txt"))

    if problem_type == "sequence_label":
        return _load_sequence(task, split, task_dir, label_map)

    texts = _read_lines(os.path.join(task_dir, f"{split}_text.txt"))
    raw_labels = _read_lines(os.path.join(task_dir, f"{split}_labels.txt"))
    while texts and not texts[-1]:
        texts.pop()
    while raw_labels and not raw_labels[-1]:
        raw_labels.pop()
    if len(texts) != len(raw_labels):
        raise LengthMismatch(
            f"{len(texts)} text lines vs {len(raw_labels)} label lines")

    gold = []
    for lineno, raw in enumerate(raw_labels, start=1):
        try:
            indices = [int(tok) for tok in raw.split()]
        except ValueError:
            raise FormatError(f"non-integer label {raw!r}", line=lineno) from None
        for idx in indices:
            if not 0 <= idx < len(label_map):
                raise FormatError(
                    f"label index {idx} out of range for {len(label_map)} labels",
                    line=lineno)
        if problem_type == "multi_label":
            gold.append(set(indices))
        else:
            if len(indices) != 1:
                raise FormatError(f"expected one label index, got {raw!r}", line=lineno)
            gold.append(indices[0])
    return LabeledDataset(task=task, split=split, texts=texts, gold=gold,
                          label_map=label_map, problem_type=problem_type)


def _load_sequence(task, split, task_dir, label_map) -> LabeledDataset:
    valid_tags = {"O"}
    for t in label_map:
        valid_tags |= {f"B-{t}", f"I-{t}"}
    sentences, tags = [], []
    cur_toks, cur_tags = [], []
    path = os.path.join(task_dir, f"{split}.txt")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if cur_toks:
                    sentences.append(cur_toks)
                    tags.append(cur_tags)
                    cur_toks, cur_tags = [], []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError("sequence line must be '<token>\\t<tag>'", line=lineno)
            token, tag = parts
            if tag not in valid_tags:
                raise FormatError(f"unknown tag {tag!r}", line=lineno)
            cur_toks.append(token)
            cur_tags.append(tag)
    if cur_toks:
        sentences.append(cur_toks)
        tags.append(cur_tags)
    return LabeledDataset(task=task, split=split, texts=sentences, gold=tags,
                          label_map=label_map, problem_type="sequence_label")


def warn_if_not_test(dataset: LabeledDataset):
    if dataset.split != "test":
        warnings.warn(f"evaluating on split {dataset.split!r}, not 'test'", stacklevel=3)
