#!/usr/bin/env python3
"""Self-check of the benchmark plumbing: generate echo-style datasets for
all nine tasks, run the multi-seed benchmark with the oracle stub model,
and print the results table (every row should read 100.0).
"""
import argparse
import tempfile

from tweetkit.evaluation import render_report, run_benchmark
from tweetkit.registry import BENCHMARK_TASKS, builtin_tasks

SPECS = {s.name: s for s in builtin_tasks()}


def write_oracle_task(root, task, spec):
    d = root / task
    d.mkdir()
    (d / "mapping.txt").write_text(
        "".join(f"{i}\t{l}\n" for i, l in enumerate(spec.labels)), encoding="utf-8")
    n = max(6, len(spec.labels))
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


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", default="0,1,2")
    args = ap.parse_args()

    import pathlib
    with tempfile.TemporaryDirectory() as tmp:
        root = pathlib.Path(tmp)
        for task in BENCHMARK_TASKS:
            write_oracle_task(root, task, SPECS[task])
        report = run_benchmark("oracle://echo", data_dir=tmp,
                               seeds=tuple(int(s) for s in args.seeds.split(",")))
    print(render_report(report))
    if report.failures:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
