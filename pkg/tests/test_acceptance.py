"""End-to-end acceptance gate.

Each test covers one release criterion and prints a single PASS/FAIL line
(run with ``pytest tests/test_acceptance.py -s`` to see them inline).
"""
import math
import os
import time
from contextlib import contextmanager
from datetime import datetime, timedelta, timezone

import httpx
import numpy as np
import pytest
import torch

import oracles
import test_service
from tweetkit.backends import MappingEmbedder, Token
from tweetkit.classification import Prediction
from tweetkit.embeddings.infonce import infonce_loss, infonce_loss_torch
from tweetkit.embeddings.training import (ContrastiveConfig, LinearVectorEncoder,
                                          retrieval_accuracy_at_1,
                                          train_tweet_encoder)
from tweetkit.embeddings.tweets import tweet_similarity
from tweetkit.evaluation.benchmark import run_benchmark
from tweetkit.evaluation.datasets import LabeledDataset
from tweetkit.evaluation.finetune import FinetuneGrid, finetune
from tweetkit.evaluation.metrics import (f1_of_class, macro_f1, macro_recall,
                                         multilabel_macro_f1, span_macro_f1,
                                         spearman, stance_avg_f)
from tweetkit.ingest import (SearchQuery, TweetSearchClient, aggregate_over_time)
from tweetkit.ner import TagSequence, decode_bio, encode_bio
from tweetkit.preprocessing import RawTweet
from tweetkit.registry import BENCHMARK_TASKS, builtin_tasks

from test_finetune_benchmark import write_oracle_task

SPECS = {s.name: s for s in builtin_tasks()}


@contextmanager
def criterion(name, time_budget=None):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"FAIL: {name}")
        raise
    elapsed = time.monotonic() - start
    if time_budget is not None and elapsed > time_budget:
        print(f"FAIL: {name} (took {elapsed:.1f}s, budget {time_budget}s)")
        raise AssertionError(f"{name}: exceeded time budget")
    print(f"PASS: {name} ({elapsed:.1f}s)")


def test_metric_oracle_suite():
    with criterion("metric oracle suite (200 randomized instances, <=1e-9)",
                   time_budget=30):
        rng = np.random.default_rng(2024)
        types = ["person", "event", "location"]
        for _ in range(200):
            n = int(rng.integers(1, 51))
            k = int(rng.integers(2, 8))
            gold = rng.integers(0, k, size=n).tolist()
            pred = rng.integers(0, k, size=n).tolist()
            assert abs(macro_f1(gold, pred, k) - oracles.brute_macro_f1(gold, pred, k)) <= 1e-9
            c = int(rng.integers(0, k))
            assert abs(f1_of_class(gold, pred, c) - oracles.brute_f1_of_class(gold, pred, c)) <= 1e-9
            assert abs(macro_recall(gold, pred, k) - oracles.brute_macro_recall(gold, pred, k)) <= 1e-9
            if k >= 3:
                assert abs(stance_avg_f(gold, pred) - oracles.brute_stance_avg_f(gold, pred)) <= 1e-9

            mg = [set(np.nonzero(rng.random(k) < 0.3)[0].tolist()) for _ in range(n)]
            mp = [set(np.nonzero(rng.random(k) < 0.3)[0].tolist()) for _ in range(n)]
            assert abs(multilabel_macro_f1(mg, mp, k)
                       - oracles.brute_multilabel_macro_f1(mg, mp, k)) <= 1e-9

            def spans():
                out, pos = [], 0
                while pos < 8 and rng.random() < 0.5:
                    length = int(rng.integers(1, 3))
                    out.append((pos, pos + length, types[rng.integers(0, 3)]))
                    pos += length + int(rng.integers(0, 2))
                return out

            sg = [spans() for _ in range(min(n, 10))]
            sp = [spans() for _ in range(min(n, 10))]
            assert abs(span_macro_f1(sg, sp) - oracles.brute_span_macro_f1(sg, sp)) <= 1e-9

            if n >= 3:
                x = rng.integers(0, 10, size=n).astype(float).tolist()
                y = rng.integers(0, 10, size=n).astype(float).tolist()
                if len(set(x)) >= 2 and len(set(y)) >= 2:
                    assert abs(spearman(x, y) - oracles.brute_spearman(x, y)) <= 1e-9


def test_infonce_correctness():
    with criterion("InfoNCE hand example, ln 3 identity, gradient check",
                   time_budget=10):
        eye = np.eye(2)
        want = -math.log(math.e / (math.e + 2))
        assert abs(infonce_loss(eye, eye.copy(), 1.0) - want) <= 1e-6
        assert abs(want - 0.5514) < 1e-4

        same = np.tile([1.0, 0.0], (2, 1))
        assert abs(infonce_loss(same, same.copy(), 0.7) - math.log(3)) <= 1e-9

        rng = np.random.default_rng(7)
        feats_t = rng.normal(size=(3, 2))
        feats_r = rng.normal(size=(3, 2))
        w = torch.tensor([0.8, 1.3], dtype=torch.float64, requires_grad=True)
        t = torch.nn.functional.normalize(torch.tensor(feats_t) * w, dim=1)
        r = torch.nn.functional.normalize(torch.tensor(feats_r) * w, dim=1)
        infonce_loss_torch(t, r, 0.5).backward()
        analytic = w.grad.numpy()

        def loss_np(weights):
            a = feats_t * weights
            b = feats_r * weights
            a /= np.linalg.norm(a, axis=1, keepdims=True)
            b /= np.linalg.norm(b, axis=1, keepdims=True)
            return infonce_loss(a, b, 0.5)

        h = 1e-5
        for i in range(2):
            wp, wm = np.array([0.8, 1.3]), np.array([0.8, 1.3])
            wp[i] += h
            wm[i] -= h
            fd = (loss_np(wp) - loss_np(wm)) / (2 * h)
            assert abs(analytic[i] - fd) / max(abs(fd), 1e-12) < 1e-4


def vector_text(vec):
    return " ".join(f"{v:.6f}" for v in vec)


def test_contrastive_training_end_to_end(tmp_path):
    with criterion("contrastive training reaches held-out accuracy 1.0",
                   time_budget=120):
        dim = 8
        rng = np.random.default_rng(0)
        train = [(vector_text(v), vector_text(v))
                 for v in rng.normal(size=(64, dim))]
        heldout = [(vector_text(v), vector_text(v))
                   for v in np.random.default_rng(99).normal(size=(16, dim))]
        cfg = ContrastiveConfig(temperature=0.05, batch_size=16, learning_rate=1e-2,
                                max_steps=200, eval_every=25,
                                checkpoint_dir=str(tmp_path / "ckpts"), seed=0)
        enc = LinearVectorEncoder(dim, dim, seed=0)
        result = train_tweet_encoder(enc, train, cfg, heldout)
        assert result.best_accuracy == 1.0
        assert result.steps <= 200
        assert result.best_accuracy == max(acc for _, acc in result.history)
        assert os.path.exists(result.best_checkpoint)


def test_retrieval_oracle():
    with criterion("retrieval accuracy@1 matches O(M^2) scan; Gaussian baseline"):
        rng = np.random.default_rng(5)
        for _ in range(50):
            m = int(rng.integers(2, 201))
            mapping, pairs = {}, []
            for i in range(m):
                mapping[f"t{i}"] = rng.normal(size=6)
                mapping[f"r{i}"] = rng.normal(size=6)
                pairs.append((f"t{i}", f"r{i}"))
            got = retrieval_accuracy_at_1(MappingEmbedder(mapping, 6), pairs)
            hits = 0
            for i in range(m):
                t = np.asarray(mapping[f"t{i}"], float)
                best, best_sim = None, -np.inf
                for j in range(m):
                    r = np.asarray(mapping[f"r{j}"], float)
                    sim = t @ r / (np.linalg.norm(t) * np.linalg.norm(r))
                    if sim > best_sim:
                        best, best_sim = j, sim
                hits += best == i
            assert got == hits / m

        m = 1000
        accs = []
        for seed in range(20):
            g = np.random.default_rng(seed)
            mapping, pairs = {}, []
            for i in range(m):
                mapping[f"t{i}"] = g.normal(size=16)
                mapping[f"r{i}"] = g.normal(size=16)
                pairs.append((f"t{i}", f"r{i}"))
            accs.append(retrieval_accuracy_at_1(MappingEmbedder(mapping, 16), pairs))
        sigma = math.sqrt((1 / m) * (1 - 1 / m) / (m * 20))
        assert abs(float(np.mean(accs)) - 1 / m) <= 3 * sigma


def random_span_instance(rng, types=("person", "event", "location", "product")):
    n_tokens = int(rng.integers(1, 15))
    tokens, pos = [], 0
    for i in range(n_tokens):
        length = int(rng.integers(1, 6))
        tokens.append(Token("x" * length, pos, pos + length))
        pos += length + 1
    spans, i = [], 0
    while i < n_tokens:
        if rng.random() < 0.4:
            j = min(n_tokens - 1, i + int(rng.integers(0, 3)))
            t = types[rng.integers(0, len(types))]
            spans.append((tokens[i].start, tokens[j].end, t))
            i = j + 1
        else:
            i += 1
    return tokens, spans


def test_bio_round_trip_and_repairs():
    with criterion("BIO decode round-trip (1000 instances) + repair rules",
                   time_budget=10):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            tokens, spans = random_span_instance(rng)
            tags = encode_bio(
                [type("S", (), {"start": s, "end": e, "type": t})()
                 for s, e, t in spans], tokens)
            decoded = decode_bio(TagSequence(tokens=tokens, tags=tags))
            assert [(d.start, d.end, d.type) for d in decoded] == spans

        toks = [Token("aa", 0, 2), Token("bb", 3, 5)]
        orphan = decode_bio(TagSequence(tokens=toks, tags=["I-person", "I-person"]))
        assert len(orphan) == 1
        assert (orphan[0].type, orphan[0].start, orphan[0].end) == ("person", 0, 5)

        mismatch = decode_bio(TagSequence(tokens=toks, tags=["B-loc", "I-person"]))
        assert [(s.type, s.start, s.end) for s in mismatch] == [
            ("loc", 0, 2), ("person", 3, 5)]


def test_pipeline_smoke(tmp_path):
    with criterion("tiny fine-tune >=0.9 train accuracy; oracle benchmark all 100.0",
                   time_budget=300):
        rng = np.random.default_rng(0)
        cold = ["awful", "terrible", "worst", "sad"]
        hot = ["great", "awesome", "best", "happy"]
        texts, gold = [], []
        for i in range(32):
            label = i % 2
            texts.append(" ".join(rng.choice(hot if label else cold, size=4)))
            gold.append(label)
        train = LabeledDataset(task="hate", split="train", texts=texts, gold=gold,
                               label_map=["not_hate", "hate"])
        val = LabeledDataset(task="hate", split="validation", texts=texts[:8],
                             gold=gold[:8], label_map=["not_hate", "hate"])
        grid = FinetuneGrid(learning_rates=(1e-2,), epochs=(5,))
        handle, _ = finetune("tiny://256", train, val, grid, SPECS["hate"], seed=0)
        n_params = sum(p.numel() for p in handle.backend.parameters())
        assert n_params <= 1_000_000
        logits = np.asarray(handle.backend.logits(texts))
        assert float((logits.argmax(axis=1) == np.asarray(gold)).mean()) >= 0.9

        for task in BENCHMARK_TASKS:
            write_oracle_task(tmp_path, task, SPECS[task])
        report = run_benchmark("oracle://echo", data_dir=str(tmp_path))
        assert report.failures == {}
        for task in BENCHMARK_TASKS:
            assert 100.0 * report.scores[task] == 100.0


def test_similarity_scale():
    with criterion("similarity scale: identity 100+/-0.01, antipodal 0, orthogonal 50"):
        mapping = {"a": [0.3, 0.4], "anti": [-0.3, -0.4], "orth": [-0.4, 0.3]}
        enc = MappingEmbedder(mapping, 2)
        assert abs(tweet_similarity(enc, "a", "a") - 100.0) <= 0.01
        assert tweet_similarity(enc, "a", "anti") == 0.0
        assert tweet_similarity(enc, "a", "orth") == 50.0


def test_ingestion_contracts():
    with criterion("ingestion: pagination/dedupe, 429 retry equivalence, "
                   "count conservation"):
        pages = [
            {"data": [{"id": "1", "text": "one", "created_at": "2023-05-01T00:00:00Z"},
                      {"id": "2", "text": "two", "created_at": "2023-05-01T01:00:00Z"}],
             "meta": {"next_token": "p2"}},
            {"data": [{"id": "2", "text": "two", "created_at": "2023-05-01T01:00:00Z"},
                      {"id": "3", "text": "three", "created_at": "2023-05-01T02:00:00Z"}],
             "meta": {}},
        ]

        def run(fail_prefix):
            state = {"n": 0, "failures": list(fail_prefix)}

            def handler(request):
                if state["failures"]:
                    status, headers = state["failures"].pop(0)
                    return httpx.Response(status, headers=headers, json={})
                payload = pages[min(state["n"], len(pages) - 1)]
                state["n"] += 1
                return httpx.Response(200, json=payload)

            client = TweetSearchClient(bearer_token="t",
                                       base_url="https://upstream.test",
                                       transport=httpx.MockTransport(handler),
                                       sleep=lambda _s: None)
            q = SearchQuery(query="q",
                            start=datetime(2023, 5, 1, tzinfo=timezone.utc),
                            end=datetime(2023, 5, 2, tzinfo=timezone.utc))
            return client.fetch_tweets(q)

        clean = run([])
        assert [t.id for t in clean.tweets] == ["1", "2", "3"]  # deduped, in order
        retried = run([(429, {"retry-after": "3"})])
        assert [(t.id, t.text) for t in retried.tweets] == \
            [(t.id, t.text) for t in clean.tweets]
        assert retried.retries == 1

        rng = np.random.default_rng(1)
        labels = ["a", "b", "c"]
        for _ in range(100):
            n = int(rng.integers(1, 40))
            tweets = [RawTweet(text="t", id=str(i),
                               created_at=datetime(2023, 5, 1,
                                                   int(rng.integers(0, 24)),
                                                   int(rng.integers(0, 60)),
                                                   tzinfo=timezone.utc))
                      for i in range(n)]
            preds = [Prediction.single(labels[rng.integers(0, 3)], {})
                     for _ in range(n)]
            agg = aggregate_over_time(tweets, preds,
                                      timedelta(minutes=int(rng.integers(1, 180))))
            assert agg.total == n
            assert sum(sum(c.values()) for _, c, _ in agg.buckets) == n


def test_service_contract():
    with criterion("service contract: six endpoints vs golden fixtures + error cases"):
        client = test_service.make_client(payloads=[test_service.HASHTAG_PAGE])
        checks = [
            ("tasks", client.get("/tasks")),
            ("classify_sentiment", client.post("/classify/sentiment",
                                               json={"text": "lovely day", "top_k": 2})),
            ("ner", client.post("/ner", json={"text": "B-person I-person O B-event"})),
            ("mask", client.post("/mask", json={"text": "i want <mask>", "k": 2})),
            ("similarity", client.post("/similarity",
                                       json={"text_a": "east", "text_b": "same"})),
            ("hashtag_analysis", client.post("/hashtag-analysis",
                                             json=test_service.HASHTAG_BODY)),
        ]
        for name, resp in checks:
            assert resp.status_code == 200, name
            test_service.check_golden(name, resp.json())

        errors = [
            (client.post("/classify/nope", json={"text": "x"}), 404, "unknown_task"),
            (client.post("/classify/sentiment", json={"text": "x", "language": "zz"}),
             400, "unsupported_language"),
            (client.post("/classify/stance", json={"text": "x"}), 422, "missing_target"),
            (client.post("/mask", json={"text": "plain"}), 400, "no_mask_present"),
            (client.post("/mask", json={"text": "<mask>", "k": 10}), 400, "k_too_large"),
            (client.post("/classify/sentiment", json={}), 422, "invalid_body"),
        ]
        for resp, status, code in errors:
            assert resp.status_code == status
            assert resp.json()["error"]["code"] == code


@pytest.mark.skipif(not os.environ.get("TWEETKIT_RUN_NETWORK_EVAL"),
                    reason="needs network access to released checkpoints and "
                           "benchmark downloads; set TWEETKIT_RUN_NETWORK_EVAL=1")
def test_released_sentiment_checkpoint_scores():
    """Inference-only check of the published sentiment model against the
    public benchmark test split (optional; requires downloads)."""
    with criterion("released sentiment checkpoint within tolerance"):
        from tweetkit.evaluation.benchmark import evaluate_task
        from tweetkit.evaluation.datasets import load_dataset
        from tweetkit.registry import default_registry

        registry = default_registry()
        handle = registry.load("sentiment")
        data_dir = os.environ.get("TWEETKIT_BENCHMARK_DATA", "benchmark_data")
        test = load_dataset("sentiment", "test", data_dir)
        score = evaluate_task(handle, test)
        assert abs(100.0 * score - 73.7) <= 1.0
