from .metrics import (f1_of_class, macro_f1, macro_recall, multilabel_macro_f1,
                      span_macro_f1, span_micro_f1, spearman, stance_avg_f)
from .datasets import LabeledDataset, load_dataset
from .finetune import FinetuneGrid, TinyTextClassifier, finetune
from .benchmark import BenchmarkReport, evaluate_task, run_benchmark, render_report
from .embed_eval import (evaluate_retrieval_sets, evaluate_sts,
                         evaluate_word_similarity)

__all__ = [
    "f1_of_class", "macro_f1", "macro_recall", "multilabel_macro_f1",
    "span_macro_f1", "span_micro_f1", "spearman", "stance_avg_f",
    "LabeledDataset", "load_dataset",
    "FinetuneGrid", "TinyTextClassifier", "finetune",
    "BenchmarkReport", "evaluate_task", "run_benchmark", "render_report",
    "evaluate_retrieval_sets", "evaluate_sts", "evaluate_word_similarity",
]
