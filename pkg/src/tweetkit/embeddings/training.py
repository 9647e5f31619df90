"""Contrastive tweet-encoder training with held-out checkpoint selection.

The trainer owns its encoder for the duration of the run, writes
monotonically numbered checkpoints (atomic write-then-rename), and keeps a
"best" pointer naming the checkpoint with the highest held-out
tweet-reply retrieval accuracy.
"""
from __future__ import annotations

import json
import os
import random
import tempfile
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataExhausted, DivergedLoss, HeldoutOverlap
from .infonce import ContrastiveConfig, infonce_loss_torch
from .tweets import embed_tweet


@dataclass
class TrainResult:
    best_checkpoint: str
    best_accuracy: float
    steps: int
    history: list[tuple[int, float]] = field(default_factory=list)  # (step, heldout acc)


class LinearVectorEncoder:
    """Toy trainable encoder: texts are whitespace-separated floats, mapped
    through one linear layer. Used by the synthetic training tasks and as a
    template for plugging in real encoders."""

    def __init__(self, in_dim: int, out_dim: int, seed: int = 0, bias: bool = True):
        import torch

        torch.manual_seed(seed)
        self.linear = torch.nn.Linear(in_dim, out_dim, bias=bias)
        self.in_dim, self.out_dim = in_dim, out_dim

    def parameters(self):
        return self.linear.parameters()

    def embed_texts(self, texts):
        import torch

        feats = torch.tensor([[float(x) for x in t.split()] for t in texts],
                             dtype=torch.float32)
        return self.linear(feats)

    def state_dict(self):
        return self.linear.state_dict()

    def load_state_dict(self, state):
        self.linear.load_state_dict(state)

    # numpy-side surface so embed_tweet / retrieval work on this encoder too
    def token_states(self, text):
        import torch

        with torch.no_grad():
            return self.embed_texts([text])[0].numpy().reshape(1, -1)


def _embed_fn(encoder):
    """Normalize over the two encoder surfaces we accept: torch-style
    (embed_texts) and backend-style (token_states)."""
    if hasattr(encoder, "embed_texts"):
        import torch

        def fn(texts):
            with torch.no_grad():
                out = encoder.embed_texts(list(texts))
                out = torch.nn.functional.normalize(out, dim=1)
            return out.numpy()
        return fn
    return lambda texts: np.stack([embed_tweet(encoder, t) for t in texts])


def retrieval_accuracy_at_1(encoder, pairs) -> float:
    """Fraction of tweets whose nearest reply (cosine over all replies in
    ``pairs``) is their own; ties break toward the lowest reply index."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("retrieval needs at least one pair")
    fn = _embed_fn(encoder)
    tweets = fn([p[0] for p in pairs])
    replies = fn([p[1] for p in pairs])
    tweets = tweets / np.linalg.norm(tweets, axis=1, keepdims=True)
    replies = replies / np.linalg.norm(replies, axis=1, keepdims=True)
    sims = tweets @ replies.T
    hits = sims.argmax(axis=1) == np.arange(len(pairs))
    return float(hits.mean())


def _atomic_torch_save(obj, path):
    import torch

    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    os.close(fd)
    try:
        torch.save(obj, tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def train_tweet_encoder(encoder, pairs, cfg: ContrastiveConfig, heldout) -> TrainResult:
    """Minimize in-batch InfoNCE over mini-batches of tweet-reply pairs;
    select the checkpoint maximizing held-out retrieval accuracy.

    ``encoder`` exposes embed_texts/parameters/state_dict (torch style).
    ``pairs`` may be any iterable of (tweet, reply); it is materialized
    once and reshuffled per epoch with the configured seed. The encoder is
    left loaded with the best checkpoint's weights on return.
    """
    import torch

    train_pairs = [tuple(p) for p in pairs]
    heldout = [tuple(p) for p in heldout]
    if len(train_pairs) < cfg.batch_size:
        raise DataExhausted(
            f"need at least one full batch ({cfg.batch_size}), got {len(train_pairs)} pairs")
    overlap = set(train_pairs) & set(heldout)
    if overlap:
        raise HeldoutOverlap(f"{len(overlap)} held-out pairs appear in the training stream")

    os.makedirs(cfg.checkpoint_dir, exist_ok=True)
    opt = torch.optim.Adam(encoder.parameters(), lr=cfg.learning_rate, betas=cfg.adam_betas)
    rng = random.Random(cfg.seed)
    order = list(range(len(train_pairs)))
    rng.shuffle(order)
    cursor = 0

    best_acc = -1.0
    best_path = None
    history = []
    step = 0

    def evaluate_and_checkpoint(step_no):
        nonlocal best_acc, best_path
        acc = retrieval_accuracy_at_1(encoder, heldout)
        history.append((step_no, acc))
        path = os.path.join(cfg.checkpoint_dir, f"ckpt-{step_no:06d}.pt")
        _atomic_torch_save(encoder.state_dict(), path)
        if acc > best_acc:
            best_acc, best_path = acc, path
            pointer = os.path.join(cfg.checkpoint_dir, "best.json")
            fd, tmp = tempfile.mkstemp(dir=cfg.checkpoint_dir, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump({"checkpoint": os.path.basename(path),
                           "heldout_accuracy": acc, "step": step_no}, fh)
            os.replace(tmp, pointer)
        return acc

    while step < cfg.max_steps:
        if cursor + cfg.batch_size > len(order):
            rng.shuffle(order)
            cursor = 0
        batch = [train_pairs[i] for i in order[cursor:cursor + cfg.batch_size]]
        cursor += cfg.batch_size

        opt.zero_grad()
        t_vecs = torch.nn.functional.normalize(encoder.embed_texts([p[0] for p in batch]), dim=1)
        r_vecs = torch.nn.functional.normalize(encoder.embed_texts([p[1] for p in batch]), dim=1)
        loss = infonce_loss_torch(t_vecs, r_vecs, cfg.temperature,
                                  symmetric=cfg.symmetric,
                                  include_same_view_negatives=cfg.include_same_view_negatives)
        if not torch.isfinite(loss):
            raise DivergedLoss(f"non-finite loss at step {step}")
        loss.backward()
        opt.step()
        step += 1
        if step % cfg.eval_every == 0:
            evaluate_and_checkpoint(step)

    if step % cfg.eval_every != 0 or not history:
        evaluate_and_checkpoint(step)

    encoder.load_state_dict(torch.load(best_path, weights_only=True))
    return TrainResult(best_checkpoint=best_path, best_accuracy=best_acc,
                       steps=step, history=history)
