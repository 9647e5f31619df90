import json

import numpy as np
import pytest

from tweetkit.errors import EmptyGrid, TaskMismatch
from tweetkit.evaluation.benchmark import (BenchmarkReport, evaluate_task,
                                           oracle_handle, render_report,
                                           run_benchmark)
from tweetkit.evaluation.datasets import LabeledDataset, load_dataset
from tweetkit.evaluation.finetune import (FinetuneGrid, FinetuneLog,
                                          TinyTextClassifier, finetune)
from tweetkit.registry import BENCHMARK_TASKS, builtin_tasks

SPECS = {s.name: s for s in builtin_tasks()}


# ---------------------------------------------------------------------------
# fixture data


def toy_binary_dataset(split, n=40, seed=0):
    """Linearly separable by vocabulary: class 0 says cold words, class 1 hot."""
    rng = np.random.default_rng(seed + {"train": 0, "validation": 1, "test": 2}[split])
    cold = ["awful", "terrible", "worst", "sad", "angry"]
    hot = ["great", "awesome", "best", "happy", "love"]
    texts, gold = [], []
    for i in range(n):
        label = i % 2
        words = rng.choice(hot if label else cold, size=4).tolist()
        texts.append(" ".join(words))
        gold.append(label)
    return LabeledDataset(task="hate", split=split, texts=texts, gold=gold,
                          label_map=["not_hate", "hate"])


def write_oracle_task(root, task, spec, n=None):
    """Echo-style test split: each text names its own gold label(s); at
    least one example per class so macro averages have no absent classes."""
    if n is None:
        n = max(6, len(spec.labels))
    d = root / task
    d.mkdir()
    (d / "mapping.txt").write_text(
        "".join(f"{i}\t{l}\n" for i, l in enumerate(spec.labels)), encoding="utf-8")
    if spec.problem_type == "sequence_label":
        blocks = []
        for i in range(n):
            t = spec.labels[i % len(spec.labels)]
            blocks.append(f"B-{t}\tB-{t}\nI-{t}\tI-{t}\nO\tO\n")
        (d / "test.txt").write_text("\n".join(blocks), encoding="utf-8")
        return
    texts, labels = [], []
    for i in range(n):
        c = i % len(spec.labels)
        if spec.problem_type == "multi_label":
            second = (c + 1) % len(spec.labels)
            texts.append(f"labels:{c},{second} filler")
            labels.append(f"{c} {second}")
        else:
            texts.append(f"label:{c} filler")
            labels.append(str(c))
    (d / "test_text.txt").write_text("".join(t + "\n" for t in texts), encoding="utf-8")
    (d / "test_labels.txt").write_text("".join(l + "\n" for l in labels), encoding="utf-8")


@pytest.fixture
def oracle_data_dir(tmp_path):
    for task in BENCHMARK_TASKS:
        write_oracle_task(tmp_path, task, SPECS[task])
    return tmp_path


# ---------------------------------------------------------------------------
# grid / fine-tuning


class TestGrid:
    def test_defaults(self):
        grid = FinetuneGrid()
        assert grid.learning_rates == (1e-5, 2e-5, 5e-5)
        assert grid.epochs == tuple(range(1, 11))
        assert len(grid.cells()) == 30

    def test_empty_grid_rejected(self):
        with pytest.raises(EmptyGrid):
            FinetuneGrid(learning_rates=())
        with pytest.raises(EmptyGrid):
            FinetuneGrid(epochs=())

    def test_log_best_is_argmax(self):
        log = FinetuneLog(cells=[
            {"learning_rate": 1e-5, "epochs": 1, "validation_score": 0.4},
            {"learning_rate": 2e-5, "epochs": 2, "validation_score": 0.9},
            {"learning_rate": 5e-5, "epochs": 1, "validation_score": 0.7},
        ])
        assert log.best()["learning_rate"] == 2e-5


class TestFinetune:
    def test_tiny_model_learns_separable_data(self):
        train = toy_binary_dataset("train")
        val = toy_binary_dataset("validation")
        grid = FinetuneGrid(learning_rates=(1e-2,), epochs=(5,))
        handle, log = finetune("tiny://256", train, val, grid, SPECS["hate"], seed=0)
        logits = np.asarray(handle.backend.logits(train.texts))
        acc = float((logits.argmax(axis=1) == np.asarray(train.gold)).mean())
        assert acc >= 0.9
        assert len(log.cells) == 1
        assert handle.card.source_uri.startswith("tiny://256#finetuned")

    def test_grid_is_fully_explored_and_logged(self):
        train = toy_binary_dataset("train", n=16)
        val = toy_binary_dataset("validation", n=8)
        grid = FinetuneGrid(learning_rates=(1e-3, 1e-2), epochs=(1, 2))
        _, log = finetune("tiny://64", train, val, grid, SPECS["hate"], seed=0)
        assert len(log.cells) == 4
        assert {(c["learning_rate"], c["epochs"]) for c in log.cells} == set(grid.cells())
        assert all(0.0 <= c["validation_score"] <= 1.0 for c in log.cells)

    def test_deterministic_given_seed(self):
        train = toy_binary_dataset("train", n=16)
        val = toy_binary_dataset("validation", n=8)
        grid = FinetuneGrid(learning_rates=(1e-2,), epochs=(2,))
        h1, l1 = finetune("tiny://64", train, val, grid, SPECS["hate"], seed=3)
        h2, l2 = finetune("tiny://64", train, val, grid, SPECS["hate"], seed=3)
        assert l1.cells == l2.cells
        assert np.allclose(h1.backend.logits(val.texts), h2.backend.logits(val.texts))

    def test_unknown_uri_rejected(self):
        train = toy_binary_dataset("train", n=8)
        val = toy_binary_dataset("validation", n=8)
        with pytest.raises(ValueError):
            finetune("magic://x", train, val, FinetuneGrid(), SPECS["hate"])

    def test_empty_split_rejected(self):
        empty = LabeledDataset(task="hate", split="train", texts=[], gold=[],
                               label_map=["a", "b"])
        val = toy_binary_dataset("validation", n=4)
        with pytest.raises(ValueError):
            finetune("tiny://64", empty, val, FinetuneGrid(), SPECS["hate"])


# ---------------------------------------------------------------------------
# evaluation / benchmark


class TestEvaluateTask:
    def test_task_mismatch(self, oracle_data_dir):
        ds = load_dataset("hate", "test", oracle_data_dir)
        with pytest.raises(TaskMismatch):
            evaluate_task(oracle_handle(SPECS["emotion"]), ds)

    @pytest.mark.parametrize("task", BENCHMARK_TASKS)
    def test_oracle_scores_one(self, oracle_data_dir, task):
        spec = SPECS[task]
        ds = load_dataset(task, "test", oracle_data_dir, spec.problem_type)
        assert evaluate_task(oracle_handle(spec), ds) == 1.0


class TestRunBenchmark:
    def test_oracle_benchmark_all_tasks_perfect(self, oracle_data_dir):
        report = run_benchmark("oracle://echo", data_dir=str(oracle_data_dir))
        assert report.failures == {}
        assert set(report.scores) == set(BENCHMARK_TASKS)
        for task in BENCHMARK_TASKS:
            assert report.scores[task] == 1.0
            assert report.per_run[task] == [1.0, 1.0, 1.0]

    def test_mean_over_seeds(self):
        report = BenchmarkReport(seeds=(0, 1))
        report.per_run["hate"] = [0.5, 1.0]
        report.scores["hate"] = float(np.mean(report.per_run["hate"]))
        assert report.scores["hate"] == 0.75

    def test_failures_recorded_not_raised(self, oracle_data_dir):
        # delete one task's files: it fails, the rest still score
        for f in (oracle_data_dir / "irony").iterdir():
            f.unlink()
        (oracle_data_dir / "irony").rmdir()
        report = run_benchmark("oracle://echo", data_dir=str(oracle_data_dir))
        assert "irony" in report.failures
        assert "FileNotFoundError" in report.failures["irony"]
        assert report.scores["hate"] == 1.0

    def test_report_round_trips_json(self, oracle_data_dir):
        report = run_benchmark("oracle://echo", tasks=("hate",),
                               data_dir=str(oracle_data_dir))
        blob = json.loads(report.to_json())
        assert blob["scores"]["hate"] == 1.0
        assert blob["seeds"] == [0, 1, 2]

    def test_render_report_percentages(self):
        report = BenchmarkReport(seeds=(0,), scores={"hate": 0.737},
                                 per_run={"hate": [0.737]})
        text = render_report(report)
        assert "73.7" in text

    def test_render_report_shows_failures(self):
        report = BenchmarkReport(seeds=(0,), failures={"ner": "boom"})
        assert "FAILED" in render_report(report)

    def test_finetuned_benchmark_on_toy_task(self, tmp_path):
        # end-to-end with actual fine-tuning on a separable binary task
        d = tmp_path / "hate"
        d.mkdir()
        (d / "mapping.txt").write_text("0\tnot_hate\n1\thate\n", encoding="utf-8")
        for split in ("train", "validation", "test"):
            ds = toy_binary_dataset(split, n=24)
            (d / f"{split}_text.txt").write_text(
                "".join(t + "\n" for t in ds.texts), encoding="utf-8")
            (d / f"{split}_labels.txt").write_text(
                "".join(f"{g}\n" for g in ds.gold), encoding="utf-8")
        grid = FinetuneGrid(learning_rates=(1e-2,), epochs=(4,))
        report = run_benchmark("tiny://128", tasks=("hate",),
                               data_dir=str(tmp_path), seeds=(0,), grid=grid)
        assert report.failures == {}
        assert report.scores["hate"] >= 0.9
        assert report.grid_logs["hate"][0]["seed"] == 0


class TestTinyClassifier:
    def test_logit_shape(self):
        model = TinyTextClassifier(3, dim=32)
        out = model.logits(["one two", "three"])
        assert out.shape == (2, 3)

    def test_seeded_init_reproducible(self):
        a = TinyTextClassifier(2, dim=32, seed=5).logits(["x y z"])
        b = TinyTextClassifier(2, dim=32, seed=5).logits(["x y z"])
        assert np.allclose(a, b)
