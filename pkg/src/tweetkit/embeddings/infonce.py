"""InfoNCE contrastive loss over in-batch tweet-reply pairs.

For a batch of N aligned (tweet, reply) pairs, each anchor scores its own
positive against all 2N-2 in-batch negatives (other-view plus, by default,
same-view). The symmetric form averages over both anchor directions (2N
anchors total); both the one-direction form and the cross-view-only
negative set are available as flags.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import BatchTooSmall, NonNormalizedInput

NORM_TOLERANCE = 1e-4


@dataclass
class ContrastiveConfig:
    temperature: float = 0.05
    batch_size: int = 32
    learning_rate: float = 1e-3
    adam_betas: tuple[float, float] = (0.9, 0.999)
    max_steps: int = 1000
    eval_every: int = 50
    checkpoint_dir: str = "checkpoints"
    symmetric: bool = True
    include_same_view_negatives: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.batch_size < 2:
            raise BatchTooSmall("contrastive training needs batch_size >= 2")


def _check_batch(tweet_vecs, reply_vecs):
    t = np.asarray(tweet_vecs, dtype=float)
    r = np.asarray(reply_vecs, dtype=float)
    if t.shape != r.shape or t.ndim != 2:
        raise ValueError("tweet and reply batches must be aligned [N, d] arrays")
    if t.shape[0] < 2:
        raise BatchTooSmall("InfoNCE needs at least 2 pairs for negatives to exist")
    norms = np.concatenate([np.linalg.norm(t, axis=1), np.linalg.norm(r, axis=1)])
    if np.any(np.abs(norms - 1.0) > NORM_TOLERANCE):
        raise NonNormalizedInput("all vectors must be L2-normalized")
    return t, r


def _logsumexp(x):
    m = x.max()
    return m + np.log(np.exp(x - m).sum())


def infonce_loss(tweet_vecs, reply_vecs, temperature: float,
                 symmetric: bool = True,
                 include_same_view_negatives: bool = True) -> float:
    """Mean InfoNCE loss over all anchors (2N if symmetric, else N)."""
    t, r = _check_batch(tweet_vecs, reply_vecs)
    n = t.shape[0]
    s_tr = t @ r.T
    s_tt = t @ t.T
    s_rr = r @ r.T
    off = ~np.eye(n, dtype=bool)

    losses = []
    for i in range(n):
        cands = [s_tr[i]]  # r_i positive plus all r_j
        if include_same_view_negatives:
            cands.append(s_tt[i][off[i]])
        scores = np.concatenate(cands) / temperature
        losses.append(_logsumexp(scores) - s_tr[i, i] / temperature)
    if symmetric:
        for i in range(n):
            cands = [s_tr[:, i]]  # t_i positive plus all t_j
            if include_same_view_negatives:
                cands.append(s_rr[i][off[i]])
            scores = np.concatenate(cands) / temperature
            losses.append(_logsumexp(scores) - s_tr[i, i] / temperature)
    return float(np.mean(losses))


def infonce_loss_torch(tweet_vecs, reply_vecs, temperature: float,
                       symmetric: bool = True,
                       include_same_view_negatives: bool = True):
    """Differentiable mirror of :func:`infonce_loss` (inputs already
    normalized torch tensors [N, d])."""
    import torch

    t, r = tweet_vecs, reply_vecs
    n = t.shape[0]
    if n < 2:
        raise BatchTooSmall("InfoNCE needs at least 2 pairs for negatives to exist")
    s_tr = t @ r.T / temperature
    pos = torch.diagonal(s_tr)
    off = ~torch.eye(n, dtype=torch.bool, device=t.device)

    def direction(anchor_scores, same_view):
        rows = []
        for i in range(n):
            cands = [anchor_scores[i]]
            if include_same_view_negatives:
                cands.append(same_view[i][off[i]])
            rows.append(torch.logsumexp(torch.cat(cands), dim=0))
        return torch.stack(rows) - pos

    losses = [direction(s_tr, t @ t.T / temperature)]
    if symmetric:
        losses.append(direction(s_tr.T, r @ r.T / temperature))
    return torch.cat(losses).mean()
