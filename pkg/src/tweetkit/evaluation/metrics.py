"""Benchmark metrics.

Conventions, pinned for reproducibility:
  - macro_f1 averages over the full fixed label set; a class with no
    predictions and no gold positives contributes F1 = 0.
  - macro_recall excludes classes absent from gold.
  - span F1 (exact start/end/type match) excludes types absent from both
    gold and predictions; macro is the default, a micro variant exists.
  - spearman uses average (fractional) ranks for ties.
All scores live in [0, 1] (or [-1, 1] for spearman); percentage display
belongs to the report layer.
"""
from __future__ import annotations

from collections import Counter

import numpy as np

from ..errors import DegenerateInput, LengthMismatch


def _check_lengths(gold, pred):
    if len(gold) != len(pred):
        raise LengthMismatch(f"gold has {len(gold)} items, pred has {len(pred)}")


def _prf(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def _counts(gold, pred, label_count):
    tp = [0] * label_count
    fp = [0] * label_count
    fn = [0] * label_count
    for g, p in zip(gold, pred):
        if g == p:
            tp[g] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    return tp, fp, fn


def macro_f1(gold, pred, label_count: int) -> float:
    """Unweighted mean of per-class F1 over the fixed label set."""
    _check_lengths(gold, pred)
    tp, fp, fn = _counts(gold, pred, label_count)
    return float(np.mean([_prf(tp[c], fp[c], fn[c]) for c in range(label_count)]))


def f1_of_class(gold, pred, class_index: int) -> float:
    _check_lengths(gold, pred)
    tp = sum(1 for g, p in zip(gold, pred) if g == p == class_index)
    fp = sum(1 for g, p in zip(gold, pred) if p == class_index and g != class_index)
    fn = sum(1 for g, p in zip(gold, pred) if g == class_index and p != class_index)
    return _prf(tp, fp, fn)


def macro_recall(gold, pred, label_count: int) -> float:
    """Unweighted mean of per-class recall over classes present in gold."""
    _check_lengths(gold, pred)
    recalls = []
    for c in range(label_count):
        support = sum(1 for g in gold if g == c)
        if support == 0:
            continue
        hits = sum(1 for g, p in zip(gold, pred) if g == p == c)
        recalls.append(hits / support)
    if not recalls:
        raise DegenerateInput("gold contains no class instances")
    return float(np.mean(recalls))


def stance_avg_f(gold, pred, favor_index: int = 2, against_index: int = 1) -> float:
    """Mean of F1(favor) and F1(against); the neutral class is ignored."""
    return (f1_of_class(gold, pred, favor_index)
            + f1_of_class(gold, pred, against_index)) / 2


def multilabel_macro_f1(gold, pred, label_count: int) -> float:
    """Per-label binary F1 over the dataset, averaged across all labels."""
    _check_lengths(gold, pred)
    scores = []
    for c in range(label_count):
        tp = sum(1 for g, p in zip(gold, pred) if c in g and c in p)
        fp = sum(1 for g, p in zip(gold, pred) if c not in g and c in p)
        fn = sum(1 for g, p in zip(gold, pred) if c in g and c not in p)
        scores.append(_prf(tp, fp, fn))
    return float(np.mean(scores))


def _span_counts(gold, pred):
    """Span-level tp/fp/fn per entity type; spans are (start, end, type)
    triples (or objects with those fields) compared exactly."""
    _check_lengths(gold, pred)

    def key(span):
        if isinstance(span, tuple):
            return span
        return (span.start, span.end, span.type)

    def type_of(span):
        return key(span)[2]

    tp, fp, fn = Counter(), Counter(), Counter()
    for g_spans, p_spans in zip(gold, pred):
        g_set = Counter(key(s) for s in g_spans)
        p_set = Counter(key(s) for s in p_spans)
        for s, c in (g_set & p_set).items():
            tp[s[2]] += c
        for s, c in (p_set - g_set).items():
            fp[s[2]] += c
        for s, c in (g_set - p_set).items():
            fn[s[2]] += c
    return tp, fp, fn


def span_macro_f1(gold, pred) -> float:
    """Exact-match span F1, macro-averaged over types present in gold or
    predictions. Returns 0.0 when no spans exist on either side."""
    tp, fp, fn = _span_counts(gold, pred)
    types = sorted(set(tp) | set(fp) | set(fn))
    if not types:
        return 0.0
    return float(np.mean([_prf(tp[t], fp[t], fn[t]) for t in types]))


def span_micro_f1(gold, pred) -> float:
    """Exact-match span F1 pooled over all types."""
    tp, fp, fn = _span_counts(gold, pred)
    return _prf(sum(tp.values()), sum(fp.values()), sum(fn.values()))


def _average_ranks(values) -> np.ndarray:
    """1-based ranks; ties get the mean of the ranks they straddle."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="mergesort")
    ranks = np.empty(len(arr))
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Pearson correlation of average ranks."""
    if len(x) != len(y):
        raise LengthMismatch(f"x has {len(x)} items, y has {len(y)}")
    if len(x) < 2:
        raise LengthMismatch("spearman needs at least 2 observations")
    rx, ry = _average_ranks(x), _average_ranks(y)
    sx, sy = rx.std(), ry.std()
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInput("zero rank variance")
    return float(np.mean((rx - rx.mean()) * (ry - ry.mean())) / (sx * sy))


def apply_metric(metric: str, gold, pred, label_count: int) -> float:
    """Dispatch a TaskSpec metric string ("macro_f1", "f1_of_class:1",
    "avg_f_two_classes:2,1", ...) over gold/pred."""
    name, _, arg = metric.partition(":")
    if name == "macro_f1":
        return macro_f1(gold, pred, label_count)
    if name == "f1_of_class":
        return f1_of_class(gold, pred, int(arg))
    if name == "macro_recall":
        return macro_recall(gold, pred, label_count)
    if name == "avg_f_two_classes":
        a, b = (int(t) for t in arg.split(","))
        return stance_avg_f(gold, pred, favor_index=a, against_index=b)
    if name == "multilabel_macro_f1":
        return multilabel_macro_f1(gold, pred, label_count)
    if name == "span_macro_f1":
        return span_macro_f1(gold, pred)
    if name == "span_micro_f1":
        return span_micro_f1(gold, pred)
    if name == "spearman":
        return spearman(gold, pred)
    raise ValueError(f"unknown metric {metric!r}")
