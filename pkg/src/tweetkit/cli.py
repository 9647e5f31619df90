"""Command-line entry points: evaluate, finetune, benchmark, serve."""
from __future__ import annotations

import json
import sys

import click

from .registry import BENCHMARK_TASKS, Registry, builtin_tasks, parse_manifest


def _registry(manifest_path: str | None) -> Registry:
    if manifest_path:
        with open(manifest_path, encoding="utf-8") as fh:
            return Registry(cards=parse_manifest(fh.read()))
    from .registry import default_registry
    return default_registry()


@click.group()
def main():
    """Social-media NLP toolkit."""


@main.command()
@click.argument("task")
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--model-uri", required=True, help="model to evaluate (registry uri or oracle://echo)")
@click.option("--split", default="test", show_default=True)
def evaluate(task, data_dir, model_uri, split):
    """Evaluate one model on one task split with the official metric."""
    from .evaluation import evaluate_task, load_dataset
    from .evaluation.benchmark import oracle_handle

    spec = {s.name: s for s in builtin_tasks()}[task]
    dataset = load_dataset(task, split, data_dir, spec.problem_type)
    if model_uri == "oracle://echo":
        handle = oracle_handle(spec)
    else:
        handle = _registry(None).load(task, model_id=model_uri)
    score = evaluate_task(handle, dataset)
    click.echo(f"{task} {spec.metric}: {100 * score:.1f}")


@main.command()
@click.argument("task")
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--model-uri", default="tiny://512", show_default=True)
@click.option("--learning-rates", default="1e-5,2e-5,5e-5", show_default=True)
@click.option("--epochs", default="1,2,3", show_default=True)
@click.option("--seed", default=0, show_default=True)
def finetune(task, data_dir, model_uri, learning_rates, epochs, seed):
    """Grid-search fine-tuning on a task's train/validation splits."""
    from .evaluation import FinetuneGrid, load_dataset
    from .evaluation import finetune as run_finetune

    spec = {s.name: s for s in builtin_tasks()}[task]
    train = load_dataset(task, "train", data_dir, spec.problem_type)
    val = load_dataset(task, "validation", data_dir, spec.problem_type)
    grid = FinetuneGrid(
        learning_rates=tuple(float(x) for x in learning_rates.split(",")),
        epochs=tuple(int(x) for x in epochs.split(",")))
    handle, log = run_finetune(model_uri, train, val, grid, spec, seed=seed)
    best = log.best()
    click.echo(json.dumps({"best_cell": best, "cells": log.cells}, indent=2))


@main.command()
@click.option("--data-dir", default=".", type=click.Path())
@click.option("--model-uri", default="oracle://echo", show_default=True)
@click.option("--tasks", default=",".join(BENCHMARK_TASKS), show_default=True)
@click.option("--seeds", default="0,1,2", show_default=True)
@click.option("--report-json", type=click.Path(), default=None,
              help="also write the structured report here")
def benchmark(data_dir, model_uri, tasks, seeds, report_json):
    """Run the multi-seed benchmark and print the results table."""
    from .evaluation import render_report, run_benchmark

    report = run_benchmark(model_uri, tasks=tasks.split(","), data_dir=data_dir,
                           seeds=tuple(int(s) for s in seeds.split(",")))
    click.echo(render_report(report))
    if report_json:
        with open(report_json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json(indent=2))
    if report.failures:
        sys.exit(1)


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--manifest", type=click.Path(exists=True), default=None)
@click.option("--cache-dir", type=click.Path(), default=None)
def serve(port, host, manifest, cache_dir):
    """Start the HTTP service."""
    import os

    import uvicorn

    from .ingest import BEARER_TOKEN_ENV, TweetSearchClient
    from .registry import CACHE_DIR_ENV
    from .service import create_app

    if cache_dir:
        os.environ[CACHE_DIR_ENV] = cache_dir
    client = TweetSearchClient() if os.environ.get(BEARER_TOKEN_ENV) else None
    app = create_app(registry=_registry(manifest), search_client=client)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
