#!/usr/bin/env python3
"""Train the linear tweet encoder on synthetic paired data and report the
held-out retrieval accuracy curve.

Inputs are synthetic "vector texts" (whitespace-joined floats) so the run
is CPU-only and finishes in seconds; checkpoints land in --checkpoint-dir.
"""
import argparse

import numpy as np

from tweetkit.embeddings import (ContrastiveConfig, LinearVectorEncoder,
                                 train_tweet_encoder)


def vector_text(vec):
    return " ".join(f"{v:.6f}" for v in vec)


def make_pairs(n, dim, seed, noise=0.05):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        v = rng.normal(size=dim)
        out.append((vector_text(v), vector_text(v + noise * rng.normal(size=dim))))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=128)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--steps", type=int, default=300)
    ap.add_argument("--temperature", type=float, default=0.05)
    ap.add_argument("--checkpoint-dir", default="checkpoints")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    train = make_pairs(args.pairs, args.dim, seed=args.seed)
    heldout = make_pairs(max(16, args.pairs // 4), args.dim, seed=args.seed + 1000)
    cfg = ContrastiveConfig(temperature=args.temperature, batch_size=16,
                            learning_rate=1e-2, max_steps=args.steps,
                            eval_every=25, checkpoint_dir=args.checkpoint_dir,
                            seed=args.seed)
    encoder = LinearVectorEncoder(args.dim, args.dim, seed=args.seed)
    result = train_tweet_encoder(encoder, train, cfg, heldout)

    for step, acc in result.history:
        print(f"step {step:5d}  heldout acc@1 {acc:.3f}")
    print(f"best: {result.best_accuracy:.3f} at {result.best_checkpoint}")


if __name__ == "__main__":
    main()
