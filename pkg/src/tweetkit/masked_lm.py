"""Top-k masked-word prediction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EncoderFailure, KTooLarge, WrongProblemType
from .preprocessing import normalize, validate_mask_input
from .registry import ModelHandle

# vocabulary items never surfaced as candidates (configurable per call)
DEFAULT_SPECIAL_TOKENS = frozenset({"<s>", "</s>", "<pad>", "<unk>", "<mask>",
                                    "[CLS]", "[SEP]", "[PAD]", "[UNK]", "[MASK]"})


@dataclass(frozen=True)
class MaskPrediction:
    mask_index: int
    candidates: tuple[tuple[str, float], ...]  # (token, probability), descending


def predict_mask(handle: ModelHandle, text: str, k: int = 5,
                 special_tokens: frozenset = DEFAULT_SPECIAL_TOKENS) -> list[MaskPrediction]:
    """Per mask occurrence, the k most probable vocabulary fills.

    Masks are predicted independently. Special tokens and whitespace-only
    vocabulary items are filtered before ranking.
    """
    if handle.spec.problem_type != "mask_fill":
        raise WrongProblemType(f"predict_mask() needs a mask_fill task, got {handle.spec.problem_type}")
    backend = handle.backend
    validate_mask_input(text, backend.mask_token)
    if k > len(backend.vocab):
        raise KTooLarge(f"k={k} exceeds vocabulary size {len(backend.vocab)}")
    clean = normalize(text).text
    try:
        dists = backend.mask_distributions(clean)
    except Exception as exc:
        raise EncoderFailure(str(exc)) from exc
    out = []
    keep = [i for i, tok in enumerate(backend.vocab)
            if tok not in special_tokens and tok.strip()]
    for mask_index, dist in enumerate(dists):
        dist = np.asarray(dist, dtype=float)
        ranked = sorted(keep, key=lambda i: (-dist[i], i))[:k]
        out.append(MaskPrediction(
            mask_index=mask_index,
            candidates=tuple((backend.vocab[i], float(dist[i])) for i in ranked)))
    return out
